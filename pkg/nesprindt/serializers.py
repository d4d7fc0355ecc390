"""
DRF serializers validating run and probe configuration documents.
"""
from rest_framework import serializers

from ctree.types import TreeParams
from dataset.types import COLUMN_KINDS
from prindt.types import RELATION_IN, RELATIONS, Conjunct, ForbiddenCombination
from .config import NestingSpec, ProbeConfig, RunConfig

MAX_SEED = 2 ** 64 - 1


class NestingSerializer(serializers.Serializer):
    """Nesting column and its small (fully kept) level."""
    column = serializers.CharField()
    small_level = serializers.CharField()


class ConjunctSerializer(serializers.Serializer):
    variable = serializers.CharField()
    relation = serializers.ChoiceField(choices=RELATIONS)
    levels = serializers.ListField(child=serializers.CharField(), required=False, default=list)
    value = serializers.FloatField(required=False, allow_null=True, default=None)

    def validate(self, attrs):
        if attrs['relation'] == RELATION_IN:
            if not attrs['levels']:
                raise serializers.ValidationError("Relation 'in' needs a non-empty 'levels' list.")
        elif attrs['value'] is None:
            raise serializers.ValidationError(f"Relation {attrs['relation']!r} needs a numeric 'value'.")
        return attrs


class ForbiddenCombinationSerializer(serializers.Serializer):
    conjuncts = ConjunctSerializer(many=True, allow_empty=False)


class TreeParamsMixin(serializers.Serializer):
    alpha = serializers.FloatField()
    min_split = serializers.IntegerField(min_value=2)
    min_leaf = serializers.IntegerField(min_value=1)
    max_depth = serializers.IntegerField(min_value=0, allow_null=True, required=False, default=None)

    def validate_alpha(self, value):
        if not 0.0 < value < 1.0:
            raise serializers.ValidationError("alpha must lie strictly between 0 and 1.")
        return value

    def tree_params(self):
        data = self.validated_data
        return TreeParams(
            alpha=data['alpha'],
            min_split=data['min_split'],
            min_leaf=data['min_leaf'],
            max_depth=data.get('max_depth'),
        )


class ProbeConfigSerializer(TreeParamsMixin):
    """Configuration of the ordered-part heterogeneity probe."""
    class_column = serializers.CharField()
    schema = serializers.DictField(child=serializers.ChoiceField(choices=COLUMN_KINDS), required=False, default=dict)
    nesting = NestingSerializer()
    parts = serializers.IntegerField(min_value=2)
    predictors = serializers.ListField(child=serializers.CharField(), allow_null=True, required=False, default=None)

    def to_probe_config(self):
        data = self.validated_data
        return ProbeConfig(
            nesting=NestingSpec(**data['nesting']),
            parts=data['parts'],
            tree=self.tree_params(),
            predictors=tuple(data['predictors']) if data.get('predictors') is not None else None,
            class_column=data['class_column'],
            schema_hint=tuple(sorted(data.get('schema', {}).items())),
        )


class RunConfigSerializer(TreeParamsMixin):
    """Full nested-undersampling run configuration."""
    class_column = serializers.CharField()
    schema = serializers.DictField(child=serializers.ChoiceField(choices=COLUMN_KINDS), required=False, default=dict)
    nesting = NestingSerializer()
    outer_reps = serializers.IntegerField(min_value=1)
    inner_reps = serializers.IntegerField(min_value=1)
    percents = serializers.ListField(child=serializers.FloatField(), allow_empty=False)
    k_best = serializers.IntegerField(min_value=1)
    ensemble_size = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(min_value=0, max_value=MAX_SEED)
    predictors = serializers.ListField(child=serializers.CharField(), allow_null=True, required=False, default=None)
    forbidden = ForbiddenCombinationSerializer(many=True, required=False, default=list)
    probe_parts = serializers.IntegerField(min_value=2, allow_null=True, required=False, default=None)

    def validate_percents(self, value):
        for percent in value:
            if not 0.0 < percent <= 1.0:
                raise serializers.ValidationError(f"Every percent must lie in (0, 1]; got {percent}.")
        return value

    def to_run_config(self):
        data = self.validated_data
        return RunConfig(
            nesting=NestingSpec(**data['nesting']),
            outer_reps=data['outer_reps'],
            inner_reps=data['inner_reps'],
            percents=tuple(data['percents']),
            tree=self.tree_params(),
            k_best=data['k_best'],
            ensemble_size=data['ensemble_size'],
            master_seed=data['seed'],
            forbidden=tuple(
                ForbiddenCombination(conjuncts=tuple(
                    Conjunct(
                        variable=conjunct['variable'],
                        relation=conjunct['relation'],
                        levels=tuple(conjunct['levels']),
                        value=conjunct['value'],
                    )
                    for conjunct in combination['conjuncts']
                ))
                for combination in data['forbidden']
            ),
            predictors=tuple(data['predictors']) if data.get('predictors') is not None else None,
            class_column=data['class_column'],
            schema_hint=tuple(sorted(data.get('schema', {}).items())),
            probe_parts=data.get('probe_parts'),
        )
