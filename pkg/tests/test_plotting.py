from geometry.surface_group import axis_of
from utils.plotting.disk_svg import geodesic_polyline, plot_disk, tiling_segments


def test_tiling_has_one_polyline_per_side(genus2):
    segments = tiling_segments(genus2, 1)
    assert len(segments) == genus2.ball_size(1) * genus2.n_sides
    assert all(seg.shape[1] == 2 for seg in segments)


def test_axis_polyline_ends_on_the_circle(genus2):
    axis, _ = axis_of(genus2, "b1")
    xy = geodesic_polyline(axis)
    assert abs(abs(complex(*xy[0])) - 1.0) < 1e-12
    assert abs(abs(complex(*xy[-1])) - 1.0) < 1e-12


def test_plot_disk_saves_svg(genus2, tmp_path):
    path = tmp_path / "disk.svg"
    axis, _ = axis_of(genus2, "a1")
    plot_disk(genus2, radius=1, axes=[axis], orbits=[[0j, 0.1 + 0.1j]], chords=[(0j, 0.1 + 0.1j, 0.2)],
              path=str(path))
    text = path.read_text(encoding="utf-8")
    assert text.startswith("<?xml") or "<svg" in text
