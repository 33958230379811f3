class ConfigurationException(Exception):
    """
    An exception for configuration errors
    """
    message = 'There was an error in the configuration'


class ParameterException(Exception):
    """
    An exception for invalid arguments to a computation
    """
    message = 'An invalid parameter was passed'


class NodeSliceException(ParameterException):
    """
    Raised when a detector slice sits on a node of the prepared packet, so the
    reduced state cannot be normalized
    """
    message = 'The detector slice carries no probability'


class NormalizationException(Exception):
    """
    An exception for states or densities that are not normalizable, or not
    normalized where they must be
    """
    message = 'The state is not normalized'
