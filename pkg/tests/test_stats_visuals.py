import unittest

from matplotlib.figure import Figure

import stats_visuals

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


class ChartFactoryTests(unittest.TestCase):
    def setUp(self) -> None:
        self.charts = stats_visuals.ChartFactory()

    def test_date_histogram(self) -> None:
        figure = self.charts.create_date_histogram({"2010-07": 3, "2010-08": 5, "invalid": 1})
        self.assertIsInstance(figure, Figure)
        bars = figure.axes[0].patches
        self.assertEqual([bar.get_height() for bar in bars], [3, 5, 1])
        self.assertTrue(stats_visuals.render_png(figure).startswith(PNG_MAGIC))

    def test_empty_histogram_still_renders(self) -> None:
        figure = self.charts.create_date_histogram({})
        self.assertTrue(stats_visuals.render_png(figure).startswith(PNG_MAGIC))

    def test_metadata_pie(self) -> None:
        figure = self.charts.create_metadata_pie(8, 11)
        self.assertEqual(len(figure.axes[0].patches), 2)
        empty = self.charts.create_metadata_pie(0, 0)
        self.assertEqual(len(empty.axes[0].patches), 0)


if __name__ == "__main__":  # pragma: no cover - manual execution
    unittest.main()
