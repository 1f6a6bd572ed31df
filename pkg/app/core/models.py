"""
Database models.
"""
from django.db import models


class ScenarioRunManager(models.Manager):
    """Manager for recorded runs."""

    def record(self, subcommand, seed=None, config=None, artifact=None,
               exit_code=0):
        """Create, save and return a new run."""
        if not subcommand:
            raise ValueError('Run must have a subcommand.')
        run = self.model(
            subcommand=subcommand,
            seed=seed,
            config=config or {},
            artifact=artifact or {},
            exit_code=exit_code,
        )
        run.save(using=self._db)

        return run


class ScenarioRun(models.Model):
    """One command-line run and the artifact it produced."""
    subcommand = models.CharField(max_length=32)
    seed = models.BigIntegerField(null=True, blank=True)
    config = models.JSONField(default=dict)
    artifact = models.JSONField(default=dict)
    exit_code = models.IntegerField(default=0)
    created = models.DateTimeField(auto_now_add=True)

    objects = ScenarioRunManager()

    class Meta:
        ordering = ['-created', '-id']

    def __str__(self):
        return f'{self.subcommand} (seed {self.seed}, exit {self.exit_code})'


class FuzzAnomaly(models.Model):
    """Anomaly found by a fuzz campaign, kept for replay."""
    run = models.ForeignKey(
        ScenarioRun,
        on_delete=models.CASCADE,
        related_name='anomalies',
    )
    anomaly_id = models.CharField(max_length=32)
    tag = models.CharField(max_length=32)
    input = models.JSONField()
    observation = models.JSONField()
    document = models.JSONField()

    def __str__(self):
        return f'{self.anomaly_id} ({self.tag})'
