# Generated by Django 5.2.6 on 2026-10-12 09:41

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='AnalysisRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('kind', models.CharField(choices=[('run', 'Nested Run'), ('probe', 'Heterogeneity Probe')], default='run', max_length=20)),
                ('status', models.CharField(choices=[('pending', 'Pending'), ('running', 'Running'), ('finished', 'Finished'), ('failed', 'Failed')], default='pending', max_length=20)),
                ('data_path', models.CharField(max_length=1024)),
                ('out_dir', models.CharField(max_length=1024)),
                ('config', models.JSONField(default=dict, help_text='Merged configuration document')),
                ('threads', models.PositiveIntegerField(default=1)),
                ('summary', models.JSONField(blank=True, default=dict)),
                ('error_message', models.TextField(blank=True)),
                ('exit_code', models.PositiveSmallIntegerField(blank=True, null=True)),
                ('task_id', models.CharField(blank=True, max_length=255)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('started_at', models.DateTimeField(blank=True, null=True)),
                ('finished_at', models.DateTimeField(blank=True, null=True)),
            ],
            options={
                'verbose_name': 'Analysis Run',
                'verbose_name_plural': 'Analysis Runs',
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['status', 'created_at'], name='nesprindt_a_status_4c1e0b_idx'), models.Index(fields=['kind', 'status'], name='nesprindt_a_kind_8d2f6a_idx')],
            },
        ),
    ]
