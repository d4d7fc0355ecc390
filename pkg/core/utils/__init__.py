# Task dispatch and ordered parallel map
