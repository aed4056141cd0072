from __future__ import annotations

import sys
from typing import TYPE_CHECKING, Optional, TextIO

if TYPE_CHECKING:
    from .harness import RateResult


def _fmt(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.6g}"


class UserInterface:
    """Plain reporter for CLI output."""

    def __init__(self, stream: Optional[TextIO] = None, error_stream: Optional[TextIO] = None):
        self.stream = stream or sys.stdout
        self.error_stream = error_stream or sys.stderr

    def display_message(self, message: str) -> None:
        """Display a message to the user"""
        print(message, file=self.stream)

    def display_error(self, error: str) -> None:
        """Display an error message to the user."""
        print(f"Error: {error}", file=self.error_stream)

    def display_result(self, result: 'RateResult') -> None:
        self.display_message(f"{result.kind}: slope={_fmt(result.slope)} "
                             f"+/- {_fmt(result.slope_half_width)}")

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}()"


class ConsoleInterface(UserInterface):
    """Tabular reporter: one line per grid point, then the fitted slope."""

    def display_result(self, result: 'RateResult') -> None:
        label = "delta" if result.kind == "fluct" and result.config.get("delta_grid") else "N"
        self.display_message(f"{result.kind} experiment on {result.config.get('shape')} "
                             f"({result.config.get('density')}, variant {result.config.get('variant')})")
        self.display_message(f"{label:>10} {'delta':>10} {'mean':>12} {'stderr':>12} {'median':>12}")
        for i, x in enumerate(result.grid):
            self.display_message(f"{x:>10.6g} {result.deltas[i]:>10.4g} {result.means[i]:>12.6g} "
                                 f"{result.stderrs[i]:>12.4g} {result.medians[i]:>12.6g}")
        for key, values in result.secondary.items():
            self.display_message(f"{key:>10}: " + " ".join(f"{v:.6g}" for v in values))
        if result.all_exact is False:
            self.display_message("note: some flat distances came from the sparsified solver")
        if result.slope is None:
            self.display_message("slope: undefined (fewer than two grid points)")
        else:
            self.display_message(f"slope: {result.slope:.4f} +/- {_fmt(result.slope_half_width)}")
