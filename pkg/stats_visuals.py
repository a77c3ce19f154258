"""Charts for corpus statistics.

:class:`ChartFactory` renders the monthly attribution-date histogram of a
:class:`corpus_gen.StatsReport` and the metadata/base split.  Figures are
built without pyplot so rendering never touches a GUI backend; callers
save them with :meth:`~matplotlib.figure.Figure.savefig`.
"""

from __future__ import annotations

import io
from typing import Mapping

from matplotlib.figure import Figure


class ChartFactory:
    """Factory for creating charts used in stats reports."""

    def create_date_histogram(self, histogram: Mapping[str, int]) -> Figure:
        """Return a bar chart of attribution dates per month.

        Parameters
        ----------
        histogram:
            Mapping of ``YYYY-MM`` buckets (plus ``invalid``) to counts.

        Returns
        -------
        :class:`~matplotlib.figure.Figure`
            A Matplotlib figure containing the rendered bar chart.
        """

        figure = Figure(figsize=(6, 4))
        ax = figure.add_subplot(111)

        labels = list(histogram.keys())
        heights = list(histogram.values())

        ax.bar(labels, heights, color="skyblue")
        ax.set_ylabel("Attributions")
        ax.set_title("Attribution dates by month")
        if len(labels) > 6:
            ax.tick_params(axis="x", labelrotation=45)

        figure.tight_layout()

        return figure

    def create_metadata_pie(self, metadata: int, total: int) -> Figure:
        """Return a pie chart of metadata against base triples."""

        figure = Figure(figsize=(6, 4))
        ax = figure.add_subplot(111)
        if total:
            ax.pie(
                [metadata, total - metadata],
                labels=["metadata", "base"],
                autopct="%1.1f%%",
                startangle=90,
            )
        ax.axis("equal")
        return figure


def render_png(figure: Figure) -> bytes:
    """Return ``figure`` encoded as PNG."""
    buffer = io.BytesIO()
    figure.savefig(buffer, format="png")
    return buffer.getvalue()
