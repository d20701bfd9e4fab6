r"""Exceptions raised by infospread and the exit codes the command line maps them to. """


class InfospreadError(Exception):
    r"""Base class for all domain failures. """
    exit_code = 1


class ConfigError(InfospreadError, ValueError):
    r"""Invalid configuration value or malformed configuration file.

    Args:
        message (str): description of the problem
        field (str, optional): offending field name
        line (int, optional): 1-based line number in the configuration file
        
    Attributes:
        reason (str): the message without location
    """
    exit_code = 2

    def __init__(self, message, field=None, line=None):
        self.reason = message
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f'line {line}')
        if field is not None:
            where.append(f'field {field!r}')
        if where:
            message = f'{", ".join(where)}: {message}'
        super().__init__(message)


class ClosedFormError(ConfigError):
    r"""A closed form was requested outside its validity, e.g. path-loss exponent other than 4. """


class Infeasible(InfospreadError):
    r"""No transmit power within the cap reaches the target ratio within the slot cap.

    Args:
        message (str): description
        constraint (str): the binding constraint, one of ``'power_cap'``, ``'slot_cap'``, ``'grid'``
    """
    exit_code = 3

    def __init__(self, message, constraint):
        self.constraint = constraint
        super().__init__(message)


class DegenerateDenominator(InfospreadError):
    r"""The constant-power optimum has a nonpositive denominator (inconsistent inputs). """
    exit_code = 3


class OracleMismatch(InfospreadError):
    exit_code = 4


class QuadratureError(InfospreadError):
    r"""Adaptive quadrature did not converge within the allowed subdivisions. """
    exit_code = 5


class InsufficientData(InfospreadError):
    r"""Some slot has no trial with a successful reception, so a conditional ratio is undefined. """
    exit_code = 6


EXIT_CODES = {'success': 0, 
              'validation': ConfigError.exit_code, 
              'infeasible': Infeasible.exit_code, 
              'oracle_mismatch': OracleMismatch.exit_code, 
              'quadrature': QuadratureError.exit_code, 
              'insufficient_data': InsufficientData.exit_code}
