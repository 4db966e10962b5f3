"""Exception hierarchy shared across the package."""


class OrbitLiftError(Exception):
    """Base class for all package errors."""


# -- group construction / queries ------------------------------------------

class NotOrthogonal(OrbitLiftError):
    """A generator matrix fails the orthogonality requirement."""


class CapExceeded(OrbitLiftError):
    """Closure enumeration passed the element cap (group too large or infinite)."""


class UnknownFamily(OrbitLiftError):
    """Catalog name not recognized."""


class BadParams(OrbitLiftError):
    """Catalog parameters invalid for the requested family."""


class ToleranceAmbiguity(OrbitLiftError):
    """A stabilizer membership decision fell inside the ambiguity band."""


class CertificationFailed(OrbitLiftError):
    """Irreducibility certification stayed inconclusive after retries."""


# -- invariant generation ---------------------------------------------------

class FieldOverflow(OrbitLiftError):
    """Exact coefficients exceeded the configured size bound."""


class CapTooLow(OrbitLiftError):
    """Generated system does not separate orbits; raise the degree cap."""


class NotMinimal(OrbitLiftError):
    """Operation requires a minimal generator system with certificate."""


class NotInAlgebra(OrbitLiftError):
    """Polynomial could not be expressed in the given generators."""


class NotInvariant(OrbitLiftError):
    """Subspace (or polynomial) is not invariant under the group."""


# -- hyperbolic curves ------------------------------------------------------

class NotHyperbolic(OrbitLiftError):
    """Polynomial has a root with imaginary part above tolerance."""


class GridTooCoarse(OrbitLiftError):
    """Per-step root displacement exceeds the safe bound; refine the grid."""


class Inconclusive(OrbitLiftError):
    """Multiplicity ratio test did not stabilize across window refinements."""


class OrderTooLow(OrbitLiftError):
    """First curve component vanishes to lower order than required."""


class NotInImage(OrbitLiftError):
    """Point failed the orbit-space membership test."""


# -- lifting ----------------------------------------------------------------

class NewtonDiverged(OrbitLiftError):
    """Newton continuation failed after the allowed number of bisections."""


class SeedMismatch(OrbitLiftError):
    """Seed point does not map to the curve value at the anchor time."""


class RecursionDepthExceeded(OrbitLiftError):
    """Nested zeros exceeded the lifting recursion depth cap."""


class NoMatch(OrbitLiftError):
    """No group element matches the two lifts' values/derivatives."""


class NoOverlap(OrbitLiftError):
    """Consecutive local lifts do not share grid points."""


class MultisetMismatch(OrbitLiftError):
    """Tracked root multiset disagrees with the lift's functional values."""


class Inconsistent(OrbitLiftError):
    """Assembled lift failed the final residual tolerance."""


# -- polar representations --------------------------------------------------

class NotASection(OrbitLiftError):
    """Restricted elements fail closure; the subspace is not a section."""


class NotInvariantUnderWeyl(OrbitLiftError):
    """Restricted polynomial is not invariant under the generalized Weyl group."""
