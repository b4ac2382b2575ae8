"""Command-line failures and their exit codes"""

from optparse import OptionParser

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Bad invocation; ``synopsis`` is the usage line of the command at fault"""

    def __init__(self, message, synopsis=None):
        Exception.__init__(self, message)
        self.synopsis = synopsis


class ValidationFailed(Exception):
    def __init__(self, violations):
        self.violations = tuple(violations)
        Exception.__init__(self, "{0} violation(s)".format(len(self.violations)))


class CommandParser(OptionParser):
    """An OptionParser that raises UsageError instead of exiting"""

    def error(self, msg):
        raise UsageError(msg, self.get_usage().strip())
