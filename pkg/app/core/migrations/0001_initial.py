# Generated by Django 4.2.11 on 2026-10-18 09:00

from django.db import migrations, models
import django.db.models.deletion


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ScenarioRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('subcommand', models.CharField(max_length=32)),
                ('seed', models.BigIntegerField(blank=True, null=True)),
                ('config', models.JSONField(default=dict)),
                ('artifact', models.JSONField(default=dict)),
                ('exit_code', models.IntegerField(default=0)),
                ('created', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created', '-id'],
            },
        ),
        migrations.CreateModel(
            name='FuzzAnomaly',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('anomaly_id', models.CharField(max_length=32)),
                ('tag', models.CharField(max_length=32)),
                ('input', models.JSONField()),
                ('observation', models.JSONField()),
                ('document', models.JSONField()),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='anomalies', to='core.scenariorun')),
            ],
        ),
    ]
