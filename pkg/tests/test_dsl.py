import random

import pytest

from kahlerlap.dsl import (
    Add,
    Conj,
    Coord,
    Det,
    ElaborationError,
    Lit,
    Log,
    ModSq,
    Mul,
    PotentialSyntaxError,
    Radial,
    Sub,
    elaborate,
    parse,
    parse_potential_file,
    pretty,
)
from kahlerlap.jets import Jet
from kahlerlap.rationals import Q


class TestParse:
    def test_log_modsq(self):
        assert parse("log(1 + modsq(z(1)))") == Log(Add(Lit(Q(1)), ModSq(Coord(1))))

    def test_det_matrix(self):
        node = parse("det([1 + modsq(z(1)), z(2); conj(z(2)), 1])")
        assert isinstance(node, Det)
        assert len(node.rows) == 2 and len(node.rows[0]) == 2
        assert node.rows[1] == (Conj(Coord(2)), Lit(Q(1)))

    def test_precedence(self):
        assert parse("1 + 2 * z(1)") == Add(Lit(Q(1)), Mul(Lit(Q(2)), Coord(1)))
        assert parse("1 - 2 - 3") == Sub(Sub(Lit(Q(1)), Lit(Q(2))), Lit(Q(3)))

    def test_rational_literal(self):
        assert parse("3/4") == Lit(Q(3, 4))

    def test_radial_factor(self):
        assert parse("radial(0, 1, 1/2)") == Radial((Q(0), Q(1), Q(1, 2)))

    def test_syntax_error_position(self):
        with pytest.raises(PotentialSyntaxError) as exc:
            parse("log(")
        assert exc.value.col == 5

    def test_unknown_identifier(self):
        with pytest.raises(PotentialSyntaxError):
            parse("exp(z(1))")

    def test_trailing_input(self):
        with pytest.raises(PotentialSyntaxError):
            parse("1 + 1) + 2")

    def test_comment_and_whitespace(self):
        assert parse("1 +  # comment\n modsq(z(1))") == parse("1 + modsq(z(1))")


class TestPretty:
    CASES = [
        "log(1 + modsq(z(1)))",
        "det([1, z(1); conj(z(1)), 1])",
        "0 - log(1 - modsq(z(1)))",
        "radial(0, 1, 1/2)",
        "1/2 * log(1 + modsq(z(2)))",
        "(1 + z(1)) * (1 - z(1))",
    ]

    @pytest.mark.parametrize("text", CASES)
    def test_round_trip(self, text):
        tree = parse(text)
        assert parse(pretty(tree)) == tree

    def test_random_trees(self):
        rng = random.Random(99)

        def gen(depth):
            if depth == 0:
                return rng.choice([Lit(Q(rng.randint(0, 5), rng.randint(1, 3))),
                                   Coord(rng.randint(1, 2))])
            op = rng.randrange(6)
            if op == 0:
                return Add(gen(depth - 1), gen(depth - 1))
            if op == 1:
                return Sub(gen(depth - 1), gen(depth - 1))
            if op == 2:
                return Mul(gen(depth - 1), gen(depth - 1))
            if op == 3:
                return Conj(gen(depth - 1))
            if op == 4:
                return ModSq(gen(depth - 1))
            return Det(((gen(depth - 1), gen(depth - 1)),
                        (gen(depth - 1), gen(depth - 1))))

        for _ in range(200):
            tree = gen(rng.randint(1, 4))
            assert parse(pretty(tree)) == tree


class TestElaborate:
    def test_fubini_study_line(self):
        jet = elaborate(parse("log(1 + modsq(z(1)))"), 1, 4)
        assert jet == Jet.monomial(1, (1,), (1,), 1, 4) + Jet.monomial(
            1, (2,), (2,), Q(-1, 2), 4
        )

    def test_polynomial(self):
        jet = elaborate(parse("modsq(z(1)) + modsq(z(1)) * modsq(z(2))"), 2, 4)
        assert jet == Jet.monomial(2, (1, 0), (1, 0), 1, 4) + Jet.monomial(
            2, (1, 1), (1, 1), 1, 4
        )

    def test_log_constant_normalized_away(self):
        # log(2 + s) and log(1 + s/2) give the same potential
        a = elaborate(parse("log(2 + modsq(z(1)))"), 1, 4)
        b = elaborate(parse("log(1 + 1/2 * modsq(z(1)))"), 1, 4)
        assert a == b

    def test_log_requires_positive_constant(self):
        with pytest.raises(ElaborationError):
            elaborate(parse("log(modsq(z(1)))"), 1, 4)
        with pytest.raises(ElaborationError):
            elaborate(parse("log(0 - 1 + modsq(z(1)))"), 1, 4)

    def test_index_out_of_range(self):
        with pytest.raises(ElaborationError):
            elaborate(parse("modsq(z(3))"), 2, 4)

    def test_radial_elaborates(self):
        from kahlerlap.jets import substitute_radial
        from kahlerlap.series import TSeries

        jet = elaborate(parse("radial(0, 1, 1/2)"), 2, 6)
        assert jet == substitute_radial(TSeries([0, 1, Q(1, 2)], order=3), 2, 6)

    def test_det_non_square_rejected(self):
        with pytest.raises(ElaborationError):
            elaborate(parse("det([1, z(1)])"), 1, 4)

    def test_degree_monotone(self):
        text = "log(1 + modsq(z(1)) + 4 * modsq(z(1) * z(2)))"
        deep = elaborate(parse(text), 2, 8)
        shallow = elaborate(parse(text), 2, 4)
        assert deep.truncated(4) == shallow


class TestPotFiles:
    def test_parse_file(self):
        text = "# sample potential\ndim 2\nlog(1 + modsq(z(1)) + modsq(z(2)))\n"
        n, expr = parse_potential_file(text)
        assert n == 2
        assert expr == parse("log(1 + modsq(z(1)) + modsq(z(2)))")

    def test_multiline_body(self):
        text = "dim 1\nlog(1 +\n  modsq(z(1)))\n"
        n, expr = parse_potential_file(text)
        assert expr == parse("log(1 + modsq(z(1)))")

    def test_missing_header(self):
        with pytest.raises(PotentialSyntaxError):
            parse_potential_file("log(1 + modsq(z(1)))\n")

    def test_missing_body(self):
        with pytest.raises(PotentialSyntaxError):
            parse_potential_file("dim 2\n# nothing\n")
