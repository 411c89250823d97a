import pytest

from fixture_data import RATIO, ENERGY, QUARTIC, LIFESPAN, TRAJECTORY, write


@pytest.fixture
def fixture_dir(tmp_path):
    """A fake experiment output tree covering every figure kind."""
    root = tmp_path / "outputs"
    write(root / "symbol" / "phi_ratio.csv", RATIO)
    write(root / "energy" / "energy_scan.csv", ENERGY)
    write(root / "quartic" / "quartic_scan.csv", QUARTIC)
    write(root / "lifespan" / "lifespan_scan.csv", LIFESPAN)
    write(root / "simulate" / "trajectory.csv", TRAJECTORY)
    # plotting fodder plotkit should skip: unrecognized schema
    write(root / "symbol" / "bounds.csv", "model,c_min,c_max,samples,worst_a,worst_b\nphi_bound,0.17,2.2,262144,1,1\n")
    return root
