import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrs import lowdisc
from qrs.lowdisc import (
    GeneratorSpec,
    PointSet,
    build_sobol_table,
    first_primes,
    generate,
    halton,
    max_sobol_dim,
    radical_inverse,
    scale_to_box,
    sobol,
    uniform_random,
    write_csv,
)

from oracles import parse_direction_file, radical_inverse_ref, sobol_point_ref


# ---------------------------------------------------------------- radical inverse


def test_radical_inverse_base2_first_eight():
    got = radical_inverse(np.arange(8), 2)
    expected = [0.0, 0.5, 0.25, 0.75, 0.125, 0.625, 0.375, 0.875]
    assert got.tolist() == expected


def test_radical_inverse_base3_values():
    got = radical_inverse([0, 1, 2, 3, 4, 9], 3)
    expected = np.array([0.0, 1 / 3, 2 / 3, 1 / 9, 4 / 9, 1 / 27])
    np.testing.assert_allclose(got, expected, rtol=0, atol=1e-15)


@settings(max_examples=200, deadline=None)
@given(
    i=st.integers(min_value=0, max_value=2**40),
    base=st.integers(min_value=2, max_value=101),
)
def test_radical_inverse_matches_exact_rational_oracle(i, base):
    got = radical_inverse(i, base)[0]
    assert got == pytest.approx(radical_inverse_ref(i, base), abs=1e-15)
    assert 0.0 <= got < 1.0


def test_radical_inverse_rejects_bad_input():
    with pytest.raises(ValueError):
        radical_inverse(3, 1)
    with pytest.raises(ValueError):
        radical_inverse(-1, 2)


# ---------------------------------------------------------------------- halton


def test_halton_2d_opening_points():
    got = halton(4, 2)
    expected = np.array(
        [[0.0, 0.0], [0.5, 1 / 3], [0.25, 2 / 3], [0.75, 1 / 9]]
    )
    np.testing.assert_allclose(got, expected, rtol=0, atol=1e-15)


def test_halton_in_unit_cube_and_deterministic():
    a = halton(500, 7)
    b = halton(500, 7)
    assert (a == b).all()
    assert (a >= 0.0).all() and (a < 1.0).all()


def test_halton_offset_consistency():
    whole = halton(64, 3)
    head = halton(40, 3)
    tail = halton(24, 3, offset=40)
    assert (np.vstack([head, tail]) == whole).all()


def test_halton_first_column_is_van_der_corput():
    m = 8
    col = halton(2**m, 1).ravel()
    assert sorted(col) == [k / 2**m for k in range(2**m)]


def test_first_primes():
    assert first_primes(10).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert int(first_primes(1024)[-1]) == 8161


# ----------------------------------------------------------------------- sobol


def test_sobol_dim1_opening_points():
    # direct-index XOR with v_k = 2^-k: i=2 selects v_2 = 1/4 alone
    got = sobol(4, 1).ravel()
    assert got.tolist() == [0.0, 0.5, 0.25, 0.75]


@pytest.mark.parametrize("m", range(1, 11))
def test_sobol_dim1_blocks_are_dyadic_grids(m):
    pts = sorted(sobol(2**m, 1).ravel().tolist())
    assert pts == [k / 2**m for k in range(2**m)]


def test_sobol_2d_first_eight_match_digit_loop_oracle():
    rows = parse_direction_file()
    got = sobol(8, 2)
    ref = np.array([sobol_point_ref(i, 2, rows=rows) for i in range(8)])
    assert (got == ref).all()


@pytest.mark.parametrize("dim", [3, 8, 100])
def test_sobol_matches_oracle_at_scattered_indices(dim):
    rows = parse_direction_file()
    idx = [0, 1, 2, 5, 17, 256, 1023, 65537, 2**29 + 12345]
    got = sobol(len(idx), dim, offset=0)  # offsets below instead
    for k, i in enumerate(idx):
        one = sobol(1, dim, offset=i)
        ref = np.array(sobol_point_ref(i, dim, rows=rows))
        assert (one[0] == ref).all(), i
    assert got.shape == (len(idx), dim)


def test_sobol_offset_consistency_and_range():
    whole = sobol(128, 6)
    head = sobol(100, 6)
    tail = sobol(28, 6, offset=100)
    assert (np.vstack([head, tail]) == whole).all()
    assert (whole >= 0.0).all() and (whole < 1.0).all()


def test_sobol_capacity_error():
    with pytest.raises(ValueError):
        sobol(3, 2, offset=2**30 - 1)
    # largest representable window is fine
    out = sobol(2, 2, offset=2**30 - 2)
    assert out.shape == (2, 2)


def test_sobol_dim_limit():
    assert max_sobol_dim() == 1024
    build_sobol_table(1024)
    with pytest.raises(ValueError):
        build_sobol_table(1025)


# ------------------------------------------------------------------ sobol table


def test_table_dim1_is_van_der_corput_column():
    t = build_sobol_table(1, max_bits=30)
    expected = np.array([1 << (30 - k) for k in range(1, 31)], dtype=np.uint64)
    assert (t.v[0] == expected).all()


def test_table_dim2_m_values():
    # axis 2 has s=1, a=0: m_k = 2 m_{k-1} xor m_{k-1} -> 1, 3, 5, 15, 17, 51
    t = build_sobol_table(2, max_bits=30)
    m = [int(t.v[1, k - 1]) >> (30 - k) for k in range(1, 7)]
    assert m == [1, 3, 5, 15, 17, 51]


def test_table_dim7_uses_polynomial_coefficients():
    # axis 7: s=4, a=4 (binary 100), m init 1,3,5,13
    # m_5 = 2*m_4 xor 2^4 m_1 xor m_1 = 26 xor 17 = 11
    t = build_sobol_table(7, max_bits=30)
    m5 = int(t.v[6, 4]) >> (30 - 5)
    assert m5 == 11


def test_table_m_values_odd_and_bounded():
    t = build_sobol_table(50, max_bits=30)
    for j in range(50):
        for k in range(1, 31):
            m = int(t.v[j, k - 1]) >> (30 - k)
            assert m % 2 == 1
            assert m < 2**k


def test_direction_file_row_for_dim2():
    rows = parse_direction_file()
    assert rows[2][:2] == (1, 0)
    assert rows[2][2][:1] == [1]
    assert max(rows) >= 100


# --------------------------------------------------------------------- uniform


def test_uniform_deterministic_and_seed_sensitivity():
    a = uniform_random(100, 4, seed=1)
    b = uniform_random(100, 4, seed=1)
    c = uniform_random(100, 4, seed=2)
    assert (a == b).all()
    assert (a != c).any()
    assert (a >= 0.0).all() and (a < 1.0).all()


def test_uniform_offset_consistency_any_alignment():
    whole = uniform_random(21, 5, seed=3)
    parts = [uniform_random(k, 5, seed=3, offset=o) for k, o in ((7, 0), (1, 7), (13, 8))]
    assert (np.vstack(parts) == whole).all()


# ----------------------------------------------------------- spec / pointset api


def test_generator_spec_validation():
    with pytest.raises(ValueError):
        GeneratorSpec("fibonacci", 2)
    with pytest.raises(ValueError):
        GeneratorSpec("halton", 0)
    with pytest.raises(ValueError):
        GeneratorSpec("halton", 2, offset=-1)
    s = GeneratorSpec("sobol", 3, offset=5).advanced(7)
    assert s.offset == 12 and s.kind == "sobol"


def test_generate_dispatch():
    for kind in ("halton", "sobol", "uniform"):
        ps = generate(GeneratorSpec(kind, 3, seed=11), 17)
        assert ps.points.shape == (17, 3)
        assert ps.spec.kind == kind
    assert (generate(GeneratorSpec("halton", 2), 4).points == halton(4, 2)).all()


def test_pointset_is_readonly():
    ps = generate(GeneratorSpec("halton", 2), 4)
    with pytest.raises(ValueError):
        ps.points[0, 0] = 5.0


def test_scale_to_box():
    ps = PointSet(np.array([[0.0, 0.5], [0.25, 0.75]]), GeneratorSpec("halton", 2))
    scaled = scale_to_box(ps, -1.0, 1.0)
    np.testing.assert_allclose(
        scaled.points, [[-1.0, 0.0], [-0.5, 0.5]], rtol=0, atol=0
    )
    assert scaled.lower.tolist() == [-1.0, -1.0]
    with pytest.raises(ValueError):
        scale_to_box(ps, 1.0, -1.0)


def test_write_csv_roundtrip(tmp_path):
    ps = generate(GeneratorSpec("sobol", 3), 5)
    path = tmp_path / "pts.csv"
    write_csv(ps, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "i,x1,x2,x3"
    assert len(lines) == 6
    body = np.array([[float(v) for v in ln.split(",")[1:]] for ln in lines[1:]])
    assert (body == ps.points).all()
    idx = [int(ln.split(",")[0]) for ln in lines[1:]]
    assert idx == list(range(5))


def test_write_csv_empty_set_is_header_only(tmp_path):
    ps = generate(GeneratorSpec("halton", 2), 0)
    path = tmp_path / "empty.csv"
    write_csv(ps, path)
    assert path.read_text() == "i,x1,x2\n"
