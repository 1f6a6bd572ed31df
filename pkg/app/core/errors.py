"""
Error hierarchy shared by every qkdlab app.

Each error carries a machine-readable code, a message and a context dict,
and knows the process exit code the command line reports for it.
"""


class QkdlabError(Exception):
    """Base error for the toolkit."""
    code = 'qkdlab-error'
    exit_code = 1

    def __init__(self, message, context=None, code=None):
        super().__init__(message)
        self.message = message
        self.context = dict(context or {})
        if code is not None:
            self.code = code

    def to_dict(self):
        """Return the {code, message, context} triple."""
        return {
            'code': self.code,
            'message': self.message,
            'context': self.context,
        }


class ConfigError(QkdlabError):
    """Scenario configuration or parameters are invalid."""
    code = 'config-error'
    exit_code = 2


class RegistryError(ConfigError):
    """States or operations disagree about the mode registry."""
    code = 'registry-error'


class DomainError(ConfigError):
    """An operation was applied outside its domain."""
    code = 'domain-error'


class PhotonCutoffError(ConfigError):
    """A Fock expansion exceeded the per-mode photon cutoff."""
    code = 'photon-cutoff'


class UnknownOutcomeError(ConfigError):
    """An outcome id does not belong to the receiver setting."""
    code = 'unknown-outcome'


class EmbeddingError(ConfigError):
    """Alice's states are not contained in the reversed space."""
    code = 'embedding-error'


class DimensionMismatchError(ConfigError):
    """An attack does not match the receiver's reversed space."""
    code = 'dimension-mismatch'


class SchemaVersionError(ConfigError):
    """An artifact was written with another schema version."""
    code = 'schema-version'


class EmptyLogError(ConfigError):
    """A round log without rounds cannot be estimated."""
    code = 'empty-log'


class UnsupportedHypothesesError(QkdlabError):
    """Helstrom discrimination was asked for more than two hypotheses."""
    code = 'unsupported-hypotheses'
    exit_code = 2

    def __init__(self, message, overlaps, context=None):
        context = dict(context or {})
        context['overlaps'] = [
            [[float(value.real), float(value.imag)] for value in row]
            for row in overlaps
        ]
        super().__init__(message, context)
        self.overlaps = overlaps


class InfeasibleSynthesisError(QkdlabError):
    """The Gram conditions have no solution at the requested eve_dim."""
    code = 'infeasible-synthesis'
    exit_code = 3

    def __init__(self, message, requested_eve_dim, minimal_eve_dim=None):
        super().__init__(message, {
            'requested_eve_dim': requested_eve_dim,
            'minimal_eve_dim': minimal_eve_dim,
        })
        self.requested_eve_dim = requested_eve_dim
        self.minimal_eve_dim = minimal_eve_dim


class VerificationFailure(QkdlabError):
    """An attack produced amplitude on error or invalid outcomes."""
    code = 'verification-failure'
    exit_code = 4
