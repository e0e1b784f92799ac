"""Quick check that the extension module loads and answers sensibly."""

import json

import surfglue_py as sg

cat = sg.Catalog()
assert len(cat.kinds()) == 18
assert cat.kind("T_0") == (1, 1, 0, -1)
assert cat.patterns("D_1") == [[[1, 3, 4]]]
assert not cat.can_coexist("A_0", "U_02")
assert cat.can_coexist("D_1", "D_2")

shapes = cat.enumerate(2, 0)
assert len(shapes) == 6, shapes
assert (["P_0"], ["P_0"], "I-b") in shapes
assert [s[2] for s in cat.enumerate(0, 4)].count("III-b") == 3
assert cat.enumerate(0, 0) == [(["D_0"], ["D_0"], None)]

status, label, reason, _ = cat.check(["Q_01"], ["A_0", "A_0"], 2, 0)
assert (status, label, reason) == ("rejected", None, "boundary_mismatch")
assert cat.check(["D_1"], ["D_3"], 0, 4)[:2] == ("accepted", "III-a")

assert sg.braid_is_trivial(4, [1, -1])
assert not sg.braid_is_trivial(3, [1, 2, -1, -2])
assert sg.braid_permutation(3, [1, 2]) == [2, 3, 1]
assert sg.braid_free_reduce(4, [1, 2, -2, 1]) == [1, 1]

code, out, _ = sg.run_cli(["enumerate", "--genus", "1", "--punctures", "2", "--format", "json"])
assert code == 0 and len(json.loads(out)["results"]) == 7

again = sg.Catalog(cat.to_json())
assert again.to_json() == cat.to_json()

try:
    cat.kind("Z_9")
except KeyError:
    pass
else:
    raise AssertionError("unknown kind accepted")

print("smoke test passed")
