"""LaTeX emitters for polynomials and block matrices."""
from __future__ import annotations

from .poly import MultiPoly, PolyMatrix


def _coeff_str(c: complex) -> str:
    if abs(c.imag) < 1e-12:
        return f"{c.real:.6g}"
    if abs(c.real) < 1e-12:
        return f"{c.imag:.6g}i"
    sign = "+" if c.imag >= 0 else "-"
    return f"({c.real:.6g}{sign}{abs(c.imag):.6g}i)"


def poly_to_latex(p: MultiPoly) -> str:
    if p.is_zero():
        return "0"
    bits = []
    for exp in sorted(p.terms, reverse=True):
        mono = "".join(f"x_{i}" if e == 1 else f"x_{i}^{{{e}}}"
                       for i, e in enumerate(exp) if e)
        coeff = _coeff_str(p.terms[exp])
        bits.append(f"{coeff} {mono}".strip() if mono else coeff)
    return " + ".join(bits)


def matrix_to_latex(m: PolyMatrix, block_size: int = 3) -> str:
    """pmatrix layout with \\; spacing between size-3 block columns."""
    lines = [r"\begin{pmatrix}"]
    for i in range(m.rows):
        cells = []
        for j in range(m.cols):
            cell = poly_to_latex(m.entries[i][j])
            if j and j % block_size == 0:
                cell = r"\;" + cell
            cells.append(cell)
        sep = r" \\" if i < m.rows - 1 else ""
        lines.append(" & ".join(cells) + sep)
    lines.append(r"\end{pmatrix}")
    return "\n".join(lines)
