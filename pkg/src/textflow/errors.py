"""Exception hierarchy shared across the toolkit.

Input-side problems (bad files, bad formats, contracts violated by the
caller) derive from :class:`InputError`.  Problems detected while checking
a constructed artifact (net structure, state-space budgets) derive from
:class:`ValidationError`.  The CLI maps the two families to exit codes
1 and 2 respectively.
"""


class TextflowError(Exception):
    """Base class for all toolkit errors."""


class InputError(TextflowError):
    """Malformed or inconsistent input data."""


class ValidationError(TextflowError):
    """A constructed artifact violates its structural contract."""


# conllu ------------------------------------------------------------------

class MalformedLine(InputError):
    """A CoNLL-U token line has the wrong shape."""


class BadHead(InputError):
    """A head id does not resolve to a token in the same sentence."""


class CyclicTree(InputError):
    """The head relation of a sentence contains a cycle."""


class UnknownToken(InputError):
    """A token id was requested that is not part of the tree."""


# classify ----------------------------------------------------------------

class EmptyCorpus(InputError):
    """An operation that needs at least one document got none."""


class SingleClassCorpus(InputError):
    """Training data contains only one class."""


class LengthMismatch(InputError):
    """Paired sequences have different lengths."""


# petri -------------------------------------------------------------------

class NoActivities(InputError):
    """A sub-net was requested for a sentence without usable activities."""


class EmptyDocument(ValidationError):
    """No sentence in the document contributed any usable activity."""


class InvalidNet(ValidationError):
    """A net violates the workflow-net invariants."""


class LastNotFound(InputError):
    """The sub-net to parallelize against is not part of the net."""


class MalformedPnml(InputError):
    """A PNML document cannot be interpreted as a place/transition net."""


# similarity --------------------------------------------------------------

class CyclicNet(ValidationError):
    """Trace enumeration refused because the net contains a cycle."""


class StateBudgetExceeded(ValidationError):
    """The reachability exploration exceeded its marking budget."""
