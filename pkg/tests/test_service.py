import json

import pytest
from fastapi.testclient import TestClient

from torsorlift.service import app, execute
from torsorlift.documents import InputError

HEIS = {"basis": ["x", "y", "z"], "brackets": [[0, 1, 2, "1"]], "class": 2}
TRIANGLE = {"opens": ["U0", "U1", "U2"],
            "faces": [[0], [1], [2], [0, 1], [0, 2], [1, 2], [0, 1, 2]]}
HEIS_EXT = {"g": {"basis": ["x", "y"], "brackets": [], "class": 1},
            "h": {"basis": ["w"], "brackets": [], "class": 1},
            "b": [], "c": [[0, 1, 0, "1"]]}
AB_COCYCLE = {"edges": {"0 1": {"x": "1"}, "1 2": {"y": "1"}, "0 2": {"x": "1", "y": "1"}}}
HEIS_COCYCLE = {"edges": {"0 1": {"x": "1"}, "1 2": {"y": "1"},
                          "0 2": {"x": "1", "y": "1", "z": "1/2"}}}


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


class TestEndpoints:
    def test_commands_listing(self, client):
        resp = client.get("/v1/commands")
        assert resp.status_code == 200
        assert "lift-solve" in resp.json()

    def test_check_lie(self, client):
        resp = client.post("/v1/check-lie", json={"lie": HEIS})
        assert resp.status_code == 200
        body = resp.json()
        assert body["verdict"] == "pass"
        assert body["inputs_digest"]

    def test_bch(self, client):
        resp = client.post("/v1/bch", json={"lie": HEIS, "a": "x", "b": "y"})
        assert resp.json()["data"]["pretty"] == "x + y + 1/2 z"

    def test_mc_check_and_cocycle_verify(self, client):
        for cmd in ("mc-check", "cocycle-verify"):
            resp = client.post("/v1/%s" % cmd,
                               json={"cover": TRIANGLE, "lie": HEIS, "cocycle": HEIS_COCYCLE})
            assert resp.json()["verdict"] == "pass"

    def test_lift_flow(self, client):
        resp = client.post("/v1/lift-solve", json={
            "cover": TRIANGLE, "extension": HEIS_EXT, "cocycle": AB_COCYCLE})
        body = resp.json()
        assert body["verdict"] == "pass"
        lift = body["data"]["lift"]
        resp = client.post("/v1/lift-verify", json={
            "cover": TRIANGLE, "extension": HEIS_EXT, "cocycle": AB_COCYCLE, "lift": lift})
        assert resp.json()["verdict"] == "pass"

    def test_input_error_is_422(self, client):
        resp = client.post("/v1/bch", json={"lie": HEIS, "a": "missing", "b": "y"})
        assert resp.status_code == 422
        assert resp.json()["verdict"] == "error"

    def test_malformed_scalar_is_422(self, client):
        bad = {"basis": ["x", "y"], "brackets": [[0, 1, 0, "1/0"]], "class": 2}
        resp = client.post("/v1/check-lie", json={"lie": bad})
        assert resp.status_code == 422


class TestDeterminism:
    def test_reports_reproducible(self):
        payload = {"cover": TRIANGLE, "extension": HEIS_EXT, "samples": 3}
        one = execute("bijection-test", payload).model_dump(exclude={"timing_ms"})
        two = execute("bijection-test", payload).model_dump(exclude={"timing_ms"})
        assert one == two

    def test_exit_class_separation(self):
        # mathematical failure is a clean fail verdict, not an input error
        bad = {"edges": {"0 1": {"x": "1"}}}
        report = execute("cocycle-verify", {"cover": TRIANGLE, "lie": HEIS, "cocycle": bad})
        assert report.verdict == "fail"
        with pytest.raises(InputError):
            execute("cocycle-verify", {"cover": TRIANGLE, "lie": HEIS,
                                       "cocycle": {"edges": {"0 5": {"x": "1"}}}})


class TestObstructionVerdict:
    def test_torus_obstruction_reported(self):
        import itertools

        tris = set()
        for i in range(7):
            tris.add(tuple(sorted((i, (i + 1) % 7, (i + 3) % 7))))
            tris.add(tuple(sorted((i, (i + 2) % 7, (i + 3) % 7))))
        faces = [[i] for i in range(7)]
        faces += [list(e) for e in itertools.combinations(range(7), 2)]
        faces += [list(t) for t in sorted(tris)]
        cover = {"opens": ["U%d" % i for i in range(7)], "faces": faces}
        # two independent nontrivial classes via explicit cochains
        from torsorlift.linalg import Span, solve_kernel_basis
        from fractions import Fraction as F

        edges = [tuple(e) for e in itertools.combinations(range(7), 2)]

        def d1_col(e):
            out = {}
            for t in tris:
                if set(e) <= set(t):
                    v = [u for u in t if u not in e][0]
                    out[t] = F((-1) ** tuple(t).index(v))
            return out

        ker = solve_kernel_basis({e: d1_col(e) for e in edges})
        coc = Span()
        for i in range(7):
            col = {}
            for e in edges:
                if i == e[0]:
                    col[e] = F(-1)
                elif i == e[1]:
                    col[e] = F(1)
            coc.add(col)
        gens = [v for v in ker if coc.add(v)]
        alpha, beta = gens[0], gens[1]
        payload_edges = {}
        for e in edges:
            vec = {}
            if alpha.get(e):
                vec["x"] = str(alpha[e])
            if beta.get(e):
                vec["y"] = str(beta[e])
            if vec:
                payload_edges[" ".join(map(str, e))] = vec
        report = execute("lift-solve", {
            "cover": cover, "extension": HEIS_EXT, "cocycle": {"edges": payload_edges}})
        assert report.verdict == "obstruction"
        assert report.data["obstruction_level"] == 1
        assert report.data["obstruction"]
