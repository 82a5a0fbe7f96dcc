import re
from dataclasses import dataclass

from .types import ELEMENTS, ORBITAL_LETTERS, TERM_LETTERS, DeterminantRole, Spin

_TERM_RE = re.compile(r"^(?P<config>.+)_(?P<mult>\d)(?P<L>[SPDF])$")
_SHELL_RE = re.compile(r"(\d)([spdf])(\d(?![spdf]))?")


# ===== TYPES =====

@dataclass(frozen=True)
class Shell:
    n: int
    l: int
    spin: Spin
    occupancy: float

    @property
    def label(self) -> str:
        return f"{self.n}{ORBITAL_LETTERS[self.l]}"


@dataclass(frozen=True)
class TermSymbol:
    label: str
    subshells: tuple          # ((n, l, electrons), ...) in written order
    multiplicity: int
    L: int

    @property
    def n_elec(self) -> int:
        return sum(q for _, _, q in self.subshells)

    @property
    def open_subshells(self) -> tuple:
        return tuple((n, l, q) for n, l, q in self.subshells if q < 2 * (2 * l + 1))

    @property
    def is_closed(self) -> bool:
        return not self.open_subshells


@dataclass(frozen=True)
class Configuration:
    Z: int
    shells: tuple
    term_label: str
    determinant_role: DeterminantRole

    @property
    def n_elec(self) -> float:
        return sum(s.occupancy for s in self.shells)

    @property
    def l_values(self) -> tuple:
        return tuple(sorted({s.l for s in self.shells}))

    def channels(self) -> dict:
        """Occupied shells grouped by (l, spin), each list ordered by n."""
        out = {}
        for s in self.shells:
            out.setdefault((s.l, s.spin), []).append(s)
        order = sorted(out, key=lambda key: (key[0], key[1].value))
        return {key: sorted(out[key], key=lambda s: s.n) for key in order}


# ===== PARSING =====

def parse_term(label: str) -> TermSymbol:
    """Parse '1s2_1S', '1s2s_3S', '1s2_2s_2S' style labels."""
    if not isinstance(label, str):
        raise TypeError(f"Term label must be str, got {type(label).__name__}")

    m = _TERM_RE.match(label.strip())
    if not m:
        raise ValueError(f"Malformed term label '{label}', expected e.g. '1s2s_3S'")

    config = m.group("config").replace("_", "")
    subshells = []
    pos = 0
    for tok in _SHELL_RE.finditer(config):
        if tok.start() != pos:
            break
        n, letter, q = int(tok.group(1)), tok.group(2), tok.group(3)
        l = ORBITAL_LETTERS.index(letter)
        q = int(q) if q else 1
        if n < 1 or l >= n:
            raise ValueError(f"Invalid subshell {n}{letter} in '{label}'")
        if q < 1 or q > 2 * (2 * l + 1):
            raise ValueError(f"Subshell {n}{letter} cannot hold {q} electrons")
        if any(s[0] == n and s[1] == l for s in subshells):
            raise ValueError(f"Subshell {n}{letter} listed twice in '{label}'")
        subshells.append((n, l, q))
        pos = tok.end()

    if pos != len(config) or not subshells:
        raise ValueError(f"Cannot parse configuration '{m.group('config')}' in '{label}'")

    symbol = TermSymbol(
        label=label.strip(),
        subshells=tuple(subshells),
        multiplicity=int(m.group("mult")),
        L=TERM_LETTERS.index(m.group("L")),
    )
    _check_term(symbol)
    return symbol


def _check_term(symbol: TermSymbol) -> None:
    opened = symbol.open_subshells
    if any(q != 1 for _, _, q in opened):
        raise ValueError(f"Open subshells must hold one electron in '{symbol.label}'")

    if not opened:
        expected = {(1, 0)}
    elif len(opened) == 1:
        expected = {(2, opened[0][1])}
    elif len(opened) == 2:
        ls = sorted(l for _, l, _ in opened)
        if ls[0] != 0:
            raise ValueError(f"Only singly excited s-nl pairs are supported, got '{symbol.label}'")
        expected = {(1, ls[1]), (3, ls[1])}
    else:
        raise ValueError(f"At most two open subshells are supported, got '{symbol.label}'")

    if (symbol.multiplicity, symbol.L) not in expected:
        raise ValueError(
            f"Term {symbol.multiplicity}{TERM_LETTERS[symbol.L]} is not allowed for "
            f"configuration of '{symbol.label}'"
        )


# ===== DETERMINANTS =====

def default_role(symbol: TermSymbol) -> DeterminantRole:
    if symbol.is_closed:
        return DeterminantRole.CLOSED_SHELL
    return DeterminantRole.HIGH_SPIN


def build_configuration(
    Z: int,
    term: str,
    role: DeterminantRole | str | None = None,
    n_elec: int | None = None,
) -> Configuration:
    """Spin-orbital occupations of one determinant of the term's configuration.

    Closed subshells are split evenly between spins. High-spin puts every open
    electron up; ms0_average puts the first open electron up and the second down.
    """
    symbol = parse_term(term)

    if not isinstance(Z, int) or isinstance(Z, bool) or Z < 1:
        raise ValueError(f"Nuclear charge must be a positive integer, got {Z!r}")
    if n_elec is not None and symbol.n_elec != n_elec:
        raise ValueError(f"Term '{term}' holds {symbol.n_elec} electrons, system has {n_elec}")

    role = default_role(symbol) if role is None else DeterminantRole(role)
    opened = symbol.open_subshells

    if role is DeterminantRole.CLOSED_SHELL and opened:
        raise ValueError(f"'{term}' has open subshells; it is not a closed-shell determinant")
    if role is not DeterminantRole.CLOSED_SHELL and not opened:
        raise ValueError(f"'{term}' is a closed shell; only the closed_shell determinant exists")
    if role is DeterminantRole.MS0_AVERAGE and len(opened) != 2:
        raise ValueError(f"The M_S = 0 determinant needs two open subshells, '{term}' has {len(opened)}")

    shells = []
    open_index = 0
    for n, l, q in symbol.subshells:
        if q == 2 * (2 * l + 1):
            shells.append(Shell(n, l, Spin.UP, q / 2))
            shells.append(Shell(n, l, Spin.DOWN, q / 2))
            continue
        spin = Spin.UP
        if role is DeterminantRole.MS0_AVERAGE and open_index == 1:
            spin = Spin.DOWN
        shells.append(Shell(n, l, spin, float(q)))
        open_index += 1

    return Configuration(Z=Z, shells=tuple(shells), term_label=symbol.label, determinant_role=role)


def family_configurations(Z: int, term: str, n_elec: int | None = None) -> dict:
    """Determinants whose energies the term's energy is assembled from."""
    symbol = parse_term(term)
    if symbol.is_closed:
        roles = (DeterminantRole.CLOSED_SHELL,)
    elif symbol.multiplicity == 1:
        roles = (DeterminantRole.HIGH_SPIN, DeterminantRole.MS0_AVERAGE)
    else:
        roles = (DeterminantRole.HIGH_SPIN,)
    return {role: build_configuration(Z, term, role, n_elec) for role in roles}


def resolve_system(system: str | int) -> int:
    """Nuclear charge of 'He', 'Li+', 'Be2+' style names or a bare integer."""
    if isinstance(system, int) and not isinstance(system, bool):
        return system
    m = re.match(r"^([A-Z][a-z]?)(\d*\+)?$", str(system).strip())
    if not m or m.group(1) not in ELEMENTS:
        raise ValueError(f"Unknown system '{system}', expected one of {', '.join(ELEMENTS)}")
    return ELEMENTS[m.group(1)]
