"""Exception hierarchy shared by all repalign modules.

Errors are grouped by CLI exit code: input/validation problems exit 1,
a degenerate metric exits 2, and a fast-vs-reference mismatch exits 3.
"""


class RepalignError(Exception):
    """Base class for all repalign errors."""


class ValidationError(RepalignError):
    """Input violates a documented precondition or type invariant."""


# --- feature file format ---

class BadMagic(ValidationError):
    """File does not start with the RAFS magic bytes."""


class VersionMismatch(ValidationError):
    """RAFS header carries an unsupported version or reserved bits."""


class TruncatedPayload(ValidationError):
    """File length is inconsistent with the header (short or trailing bytes)."""


class NonFiniteValue(ValidationError):
    """Feature payload contains NaN or Inf."""


# --- feature preprocessing ---

class SingleSample(ValidationError):
    """Channel normalization needs at least two samples."""


class AllFiltered(ValidationError):
    """Outlier filtering removed every sample."""


class OnlyClsToken(ValidationError):
    """Token set has a class token and no spatial tokens to pool."""


class NotPooled(ValidationError):
    """Kernel computation requires pooled features."""


# --- kernel alignment ---

class KTooLarge(ValidationError):
    """Neighbor count k must satisfy 1 <= k < n."""


class ShapeMismatch(ValidationError):
    """Paired inputs disagree on sample count or neighbor count."""


class DegenerateMask(RepalignError):
    """Mutual-kNN mask (or a centered masked kernel) vanished; score undefined."""


# --- transformation suite ---

class ScaleTooSmall(ValidationError):
    """Scale factor would shrink the image below one pixel."""


class MissingIdentityCondition(ValidationError):
    """Condition set has no identity condition to serve as baseline."""


class ConditionSetMismatch(ValidationError):
    """The two representations were not evaluated on the same condition set."""


class ZeroBaseline(ValidationError):
    """Relative change is undefined for a zero baseline score."""


# --- profiles ---

class EmptyLayerList(ValidationError):
    """Layer profile needs at least one layer feature set."""
