import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import (bisimilar_pairs, enabled_included, enumerated_preorder, hml_denotations,
                     random_corpus, random_lts, simulation_preorder, trace_included)
from test_hml import formulas

from eqspectre.energy import INF, complement_antichain, dominated_by, leq, normalize_min
from eqspectre.hml import (SPECTRUM, SPECTRUM_EDGES, conj, distinguishes, evaluate, expr_price,
                           lookup, neg, obs, render)
from eqspectre.lts import TAU, Lts, parse_aut
from eqspectre.spectroscopy import (ANSWER, CHALLENGE, NEGATIVE, OBSERVATION, POSITIVE, REVIVAL,
                                    AttackerPos, ClausePos, DefenderPos, NotWinning,
                                    SystemSpectrum, check_bisim_witness, clever_challenges,
                                    derive_preorders, finest_distinctions, quotient_partition,
                                    root, solve, spectroscope, strategy_formula, successors_clever,
                                    successors_full)

S, S1, DIV = 0, 1, 2
ALL = [n.name for n in SPECTRUM]


def test_full_successors_fig3(fig3):
    succ = successors_full(AttackerPos(S, (S1,)), fig3)
    obs_targets = {h for u, h in succ if u == OBSERVATION}
    assert obs_targets == {AttackerPos(S, (S1,)), AttackerPos(DIV, (S1,)), AttackerPos(DIV, (DIV,))}
    conj_targets = {h for u, h in succ if u == CHALLENGE}
    assert conj_targets == {DefenderPos(S, (S1,), ()), DefenderPos(S, (), (S1,))}
    assert successors_full(ClausePos(S, S), fig3) == [(POSITIVE, AttackerPos(S, (S,)))]
    assert successors_full(DefenderPos(DIV, (), ()), fig3) == []
    d = successors_full(DefenderPos(S1, (DIV,), (S,)), fig3)
    assert d == [(REVIVAL, AttackerPos(S1, (S,))), (ANSWER, ClausePos(S1, DIV))]
    c = successors_full(ClausePos(S, S1), fig3)
    assert c == [(POSITIVE, AttackerPos(S, (S1,))), (NEGATIVE, AttackerPos(S1, (S,)))]


def test_clever_successors(fig3):
    assert clever_challenges(fig3, S1, (S, DIV)) == [(), (S, DIV), (S,)]
    assert clever_challenges(fig3, S1, ()) == [()]
    for lts in [fig3] + [random_lts(s) for s in range(20)]:
        table = solve(lts, [root(p, q) for p in lts.processes for q in lts.processes])
        for g, _ in table.items():
            assert set(successors_clever(g, lts)) <= set(successors_full(g, lts))


GAME_BUDGETS = {
    AttackerPos(S, (S1,)): {(2, 2, 0, 0, 1, 1)},
    ClausePos(S, S1): {(2, 2, 0, 2, 1, 1), (2, 3, 0, 0, 2, 3)},
    DefenderPos(S, (S1,), ()): {(2, 2, 2, 2, 1, 1), (2, 3, 0, 0, 2, 3)},
    AttackerPos(S1, (S,)): {(2, 3, 0, 0, 2, 2)},
    ClausePos(S1, S): {(2, 2, 0, 0, 2, 2)},
    DefenderPos(S1, (S,), ()): {(2, 2, 0, 0, 2, 2)},
    AttackerPos(S1, (S, DIV)): {(2, 3, 0, 0, 2, 2)},
    DefenderPos(S1, (DIV,), (S,)): {(2, 3, 2, 0, 2, 2)},
    DefenderPos(S1, (S, DIV), ()): {(2, 2, 0, 0, 2, 2)},
    AttackerPos(DIV, (S1,)): {(1, 2, 0, 0, 1, 1)},
    DefenderPos(DIV, (S1,), ()): {(1, 1, 0, 0, 1, 1)},
    ClausePos(DIV, S1): {(1, 1, 0, 0, 1, 1)},
    AttackerPos(S1, (DIV,)): {(1, 1, 0, 0, 0, 0)},
    DefenderPos(S1, (DIV,), ()): {(1, 1, 1, 1, 0, 0), (1, 2, 0, 0, 1, 2)},
    ClausePos(S1, DIV): {(1, 1, 0, 1, 0, 0), (1, 2, 0, 0, 1, 2)},
    AttackerPos(DIV, ()): {(0, 1, 0, 0, 0, 0)},
    DefenderPos(DIV, (), ()): {(0, 0, 0, 0, 0, 0)},
}


def test_game_budgets_fig3(fig3):
    table = solve(fig3, [root(S, S1)], "full")
    for pos, budgets in GAME_BUDGETS.items():
        assert set(table[pos]) == budgets, pos


def test_strategy_formulas_fig3(fig3):
    table = solve(fig3, [root(S, S1), root(S1, S)], "full")
    assert strategy_formula(table, AttackerPos(DIV, (S1,)), (1, 2, 0, 0, 1, 1)) == conj(neg(obs("ec_A")))
    assert strategy_formula(table, root(S, S1), (2, 2, 0, 0, 1, 1)) == obs(TAU, conj(neg(obs("ec_A"))))
    assert strategy_formula(table, AttackerPos(DIV, ()), (0, 1, 0, 0, 0, 0)) == conj()
    phi = strategy_formula(table, root(S1, S), (2, 3, 0, 0, 2, 2))
    assert render(phi) == "⋀{¬<τ>⋀{¬<ec_A>T}}"
    # infinite components are narrowed to a minimal budget
    assert strategy_formula(table, root(S, S1), (INF,) * 6) == obs(TAU, conj(neg(obs("ec_A"))))
    with pytest.raises(NotWinning):
        strategy_formula(table, root(S, S1), (2, 1, 0, 0, 1, 1))
    capped = solve(fig3, [root(S, S1)], cap=3)
    with pytest.raises(ValueError):
        strategy_formula(capped, root(S, S1), (2, 2, 0, 0, 1, 1))


def test_pair_verdict_fig3(fig3):
    v = spectroscope(fig3, S, S1)
    assert v.preorders_pq == ["E", "T", "1S"]
    assert set(v.preorders_qp) == set(ALL) - {"B"}
    assert v.equivalences == ["E", "T", "1S"]
    assert "F" not in v.preorders_pq and "RS" in v.preorders_qp
    assert set(v.certificates_pq) == set(ALL) - {"E", "T", "1S"}
    assert set(v.certificates_qp) == {"B"}
    assert below_any(v.finest, lookup("1S").coordinate)


def below_any(ac, e):
    return any(leq(e, m) for m in ac)


def test_diagonal(fig3):
    v = spectroscope(fig3, S, S)
    assert v.budgets_pq == () and v.equivalences == ALL
    assert v.finest == ((INF,) * 6,)


def test_derive_preorders():
    assert derive_preorders([(2, 2, 0, 0, 1, 1)]) == ["E", "T", "1S"]
    assert derive_preorders([]) == ALL
    assert derive_preorders([(0, 1, 0, 0, 0, 0)]) == []


def test_verdicts_downward_closed():
    for lts in random_corpus(40, seed=5):
        spec = SystemSpectrum(lts, "clever", 3)
        for (p, q) in spec.pairs:
            holds = set(spec.preorders(p, q))
            for coarse, fine in SPECTRUM_EDGES:
                if fine in holds:
                    assert coarse in holds


def test_finest_distinctions(fig3):
    v = spectroscope(fig3, S, S1)
    assert finest_distinctions(v.budgets_pq, v.budgets_qp) == complement_antichain(
        normalize_min(v.budgets_pq + v.budgets_qp))
    assert finest_distinctions((), ()) == ((INF,) * 6,)


def _certificate_check(lts, variant="full"):
    table = solve(lts, [root(p, q) for p in lts.processes for q in lts.processes], variant)
    count = 0
    for g, budgets in table.items():
        if not isinstance(g, AttackerPos):
            continue
        for m in budgets:
            phi = strategy_formula(table, g, m)
            price = expr_price(phi)
            assert distinguishes(lts, phi, g.p, g.Q), (g, m, render(phi))
            assert leq(price, m), (g, m, render(phi))
            assert dominated_by(table[g], price)
            count += 1
    return count


def test_certificates_fig3(fig3):
    assert _certificate_check(fig3) > 0


def test_certificates_random():
    for lts in random_corpus(25, seed=9):
        _certificate_check(lts)


NEGATED_CONJUNCTION = """des (0, 10, 4)
(0, "b", 0)
(1, "a", 3)
(1, "b", 1)
(1, "b", 2)
(2, "b", 0)
(2, "b", 3)
(3, "a", 0)
(3, "a", 1)
(3, "a", 3)
(3, "b", 3)
"""


def test_negated_conjunction_clause_needed():
    # The minimal budget (2,3,0,0,2,2) is only met by a formula whose
    # negative clause negates a conjunction.
    lts = parse_aut(NEGATED_CONJUNCTION)
    g = AttackerPos(1, (0, 3))
    table = solve(lts, [g])
    m = (2, 3, 0, 0, 2, 2)
    assert m in table[g]
    phi = strategy_formula(table, g, m)
    assert render(phi) == "⋀{¬<a>⋀{¬<a>T}, ¬⋀{¬<a>T}}"
    assert expr_price(phi) == m and distinguishes(lts, phi, 1, (0, 3))
    with pytest.raises(RuntimeError):
        strategy_formula(table, g, m, strict=True)
    # the enumeration oracle agrees that this price suffices
    lang = hml_denotations(lts, m)
    assert any(mask >> 1 & 1 and not mask & 0b1001 for mask in lang)


@settings(max_examples=150, deadline=None)
@given(formulas(), st.integers(0, 400))
def test_distinction_completeness(phi, seed):
    lts = random_lts(seed, max_states=5, max_actions=2)
    sat = evaluate(lts, phi)
    price = expr_price(phi)
    for p in sat:
        Q = tuple(q for q in lts.processes if q not in sat)
        table = solve(lts, [AttackerPos(p, Q)])
        assert dominated_by(table[AttackerPos(p, Q)], price)


def test_clever_agrees_with_full():
    for lts in random_corpus(40, seed=3):
        full = SystemSpectrum(lts, "full", None)
        clever = SystemSpectrum(lts, "clever", None)
        for pq in full.pairs:
            assert full.preorders(*pq) == clever.preorders(*pq)


def test_enumeration_oracle():
    for lts in random_corpus(40, seed=17, max_states=4):
        spec = SystemSpectrum(lts, "full", None)
        for name in ("E", "T", "F", "1S"):
            pre = enumerated_preorder(lts, lookup(name).coordinate)
            for p in lts.processes:
                for q in lts.processes:
                    got = spec.preorders(p, q)
                    if got is None:
                        # cross-enabledness pairs: only E can still hold one way
                        assert name != "E" or ((p, q) in pre) == enabled_included(lts, p, q)
                        continue
                    assert (name in got) == ((p, q) in pre), (name, p, q)


def test_oracle_agreement():
    for lts in random_corpus(60, seed=23):
        spec = SystemSpectrum(lts, "clever", 3)
        bis, sim = bisimilar_pairs(lts), simulation_preorder(lts)
        for p in lts.processes:
            for q in lts.processes:
                assert spec.equivalent(p, q, "B") == ((p, q) in bis)
                assert spec.equivalent(p, q, "1S") == ((p, q) in sim and (q, p) in sim)
                assert spec.equivalent(p, q, "T") == (trace_included(lts, p, q) and trace_included(lts, q, p))
                assert spec.equivalent(p, q, "E") == (enabled_included(lts, p, q) and enabled_included(lts, q, p))
                pre = spec.preorders(p, q)
                if pre is not None and p != q:
                    assert ("1S" in pre) == ((p, q) in sim)
                    assert ("T" in pre) == trace_included(lts, p, q)


def test_bisimulation_game_property():
    for lts in random_corpus(60, seed=31, max_states=8):
        bis = bisimilar_pairs(lts)
        table = solve(lts, [root(p, q) for p in lts.processes for q in lts.processes], "clever")
        for p in lts.processes:
            for q in lts.processes:
                wins = dominated_by(table[root(p, q)], (INF,) * 6)
                assert wins == ((p, q) not in bis)


def test_bisim_witness(fig3):
    spec = SystemSpectrum(fig3, "full", None)
    assert spec.bisimulation_witness() == {(0, 0), (1, 1), (2, 2)}
    assert check_bisim_witness(fig3, spec)
    one = Lts(1, [(0, "a", 0)])
    assert check_bisim_witness(one, SystemSpectrum(one))
    for lts in random_corpus(30, seed=41, max_states=6):
        assert check_bisim_witness(lts, SystemSpectrum(lts))


def test_bisim_witness_detects_bad_tables(fig3):
    spec = SystemSpectrum(fig3, "full", None)
    spec.budgets[(S, S1)] = ()  # pretend the defender won
    assert not check_bisim_witness(fig3, spec)


def test_quotients(fig3):
    assert quotient_partition(fig3, "B").count == 3
    assert quotient_partition(fig3, "1S").count == 2
    assert quotient_partition(fig3, "T").count == 2
    assert quotient_partition(fig3, "E").count == 2


def test_parallel_matches_serial():
    lts = random_lts(77, max_states=7)
    serial = SystemSpectrum(lts, "clever", 3)
    parallel = SystemSpectrum(lts, "clever", 3, jobs=2)
    assert serial.budgets == parallel.budgets


def test_bad_variant_and_cap(fig3):
    with pytest.raises(ValueError):
        solve(fig3, [root(0, 1)], variant="nope")
    with pytest.raises(ValueError):
        spectroscope(fig3, 0, 1, cap=2)
