"""Molecular geometry, softened nuclear potentials and initial orbital guesses."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Field, Grid, sample
from .orbitals import OrbitalVector, lowdin_orthonormalize

__all__ = [
    "Atom",
    "Molecule",
    "RandomGaussians",
    "AtomicGaussians",
    "XyzParseError",
    "UnknownElementError",
    "AtomOutsideBoxError",
    "CoincidentAtomsError",
    "load_molecule",
    "nuclear_potential",
    "nuclear_repulsion",
    "initial_guess",
]

ANGSTROM_TO_BOHR = 1.8897261246

ELEMENT_CHARGES = {
    "H": 1.0,
    "He": 2.0,
    "Li": 3.0,
    "Be": 4.0,
    "B": 5.0,
    "C": 6.0,
    "N": 7.0,
    "O": 8.0,
    "F": 9.0,
    "Ne": 10.0,
}

# atoms must keep this distance (bohr) from every box face
BOX_MARGIN = 2.0


class XyzParseError(ValueError):
    """Malformed XYZ geometry text."""


class UnknownElementError(ValueError):
    """Element symbol without a charge table entry."""


class AtomOutsideBoxError(ValueError):
    """An atom sits outside (or too close to the edge of) the grid box."""


class CoincidentAtomsError(ValueError):
    """Two atoms share a position."""


@dataclass(frozen=True)
class Atom:
    symbol: str
    charge: float
    position: tuple[float, float, float]


@dataclass(frozen=True)
class Molecule:
    atoms: tuple[Atom, ...]

    def __post_init__(self):
        if any(a.charge <= 0 for a in self.atoms):
            raise ValueError("nuclear charges must be positive")
        object.__setattr__(self, "atoms", tuple(self.atoms))

    def centroid(self) -> np.ndarray:
        return np.mean([a.position for a in self.atoms], axis=0)


@dataclass(frozen=True)
class RandomGaussians:
    """Random Gaussian superposition guess, one fresh set of centers per orbital."""

    seed: int
    count_per_orbital: int = 10
    width: float = 1.0
    center_box: float = 4.0


@dataclass(frozen=True)
class AtomicGaussians:
    """One Gaussian per nucleus, cycled over shells of shrinking width."""

    width: float = 1.0


def load_molecule(text: str) -> Molecule:
    """Parse XYZ text: count line, comment line, then 'symbol x y z' rows.

    Coordinates are bohr unless the comment line contains the token
    'angstrom' (case-insensitive).
    """
    lines = text.splitlines()
    if not lines:
        raise XyzParseError("line 1: empty geometry text")
    try:
        count = int(lines[0].strip())
    except ValueError:
        raise XyzParseError(f"line 1: expected an atom count, got {lines[0]!r}") from None
    if len(lines) < count + 2:
        raise XyzParseError(
            f"line {len(lines)}: expected {count + 2} lines for {count} atoms"
        )
    comment = lines[1] if len(lines) > 1 else ""
    unit = ANGSTROM_TO_BOHR if "angstrom" in comment.lower() else 1.0
    atoms = []
    for i in range(count):
        lineno = i + 3
        parts = lines[i + 2].split()
        if len(parts) != 4:
            raise XyzParseError(f"line {lineno}: expected 'symbol x y z', got {lines[i + 2]!r}")
        symbol = parts[0].capitalize()
        if symbol not in ELEMENT_CHARGES:
            raise UnknownElementError(f"line {lineno}: unknown element {parts[0]!r}")
        try:
            xyz = tuple(unit * float(p) for p in parts[1:])
        except ValueError:
            raise XyzParseError(f"line {lineno}: non-numeric coordinate in {lines[i + 2]!r}") from None
        atoms.append(Atom(symbol, ELEMENT_CHARGES[symbol], xyz))
    return Molecule(tuple(atoms))


def _check_inside_box(mol: Molecule, grid: Grid) -> None:
    half = 0.5 * grid.box_length
    for a in mol.atoms:
        if any(abs(c) > half - BOX_MARGIN for c in a.position):
            raise AtomOutsideBoxError(
                f"atom {a.symbol} at {a.position} is within {BOX_MARGIN} bohr of the box edge "
                f"(box length {grid.box_length})"
            )


def nuclear_potential(mol: Molecule, grid: Grid, softening: float) -> Field:
    """Soft-core nuclear attraction -sum_a Z_a / sqrt(|x - R_a|^2 + s^2).

    Displacements use the minimum-image convention so the sampled potential
    is periodic and smooth across the box boundary.
    """
    if not softening > 0:
        raise ValueError(f"softening must be positive, got {softening}")
    _check_inside_box(mol, grid)
    L = grid.box_length
    x, y, z = grid.coords
    values = np.zeros(grid.shape)
    for a in mol.atoms:
        dx = (x - a.position[0] + 0.5 * L) % L - 0.5 * L
        dy = (y - a.position[1] + 0.5 * L) % L - 0.5 * L
        dz = (z - a.position[2] + 0.5 * L) % L - 0.5 * L
        values -= a.charge / np.sqrt(dx * dx + dy * dy + dz * dz + softening**2)
    return Field(grid, values)


def nuclear_repulsion(mol: Molecule) -> float:
    """Pairwise sum Z_a Z_b / |R_a - R_b| with true (unsoftened) distances."""
    total = 0.0
    atoms = mol.atoms
    for i in range(len(atoms)):
        for j in range(i + 1, len(atoms)):
            d = np.linalg.norm(np.subtract(atoms[i].position, atoms[j].position))
            if d == 0.0:
                raise CoincidentAtomsError(
                    f"atoms {i} and {j} coincide at {atoms[i].position}"
                )
            total += atoms[i].charge * atoms[j].charge / d
    return total


def _periodic_gaussian(grid: Grid, center: np.ndarray, width: float) -> np.ndarray:
    L = grid.box_length
    x, y, z = grid.coords
    dx = (x - center[0] + 0.5 * L) % L - 0.5 * L
    dy = (y - center[1] + 0.5 * L) % L - 0.5 * L
    dz = (z - center[2] + 0.5 * L) % L - 0.5 * L
    return np.exp(-(dx * dx + dy * dy + dz * dz) / width**2)


def initial_guess(
    spec: RandomGaussians | AtomicGaussians,
    mol: Molecule,
    grid: Grid,
    n_orbitals: int,
) -> OrbitalVector:
    """Build a raw guess and Lowdin-orthonormalize it onto St(N)."""
    if n_orbitals < 1:
        raise ValueError("n_orbitals must be at least 1")
    if isinstance(spec, RandomGaussians):
        rng = np.random.default_rng(spec.seed)
        centroid = mol.centroid()
        raw = []
        for _ in range(n_orbitals):
            values = np.zeros(grid.shape)
            for j in range(1, spec.count_per_orbital + 1):
                c = centroid + rng.uniform(
                    -0.5 * spec.center_box, 0.5 * spec.center_box, size=3
                )
                values += (-1.0) ** j * _periodic_gaussian(grid, c, spec.width)
            raw.append(Field(grid, values))
    elif isinstance(spec, AtomicGaussians):
        raw = []
        n_atoms = len(mol.atoms)
        for i in range(n_orbitals):
            atom = mol.atoms[i % n_atoms]
            shell = i // n_atoms
            width = spec.width / (shell + 1)
            raw.append(Field(grid, _periodic_gaussian(grid, np.array(atom.position), width)))
    else:
        raise TypeError(f"unsupported guess spec {spec!r}")
    return lowdin_orthonormalize(OrbitalVector(tuple(raw)))
