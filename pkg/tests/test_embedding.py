import base64
import http.server
import json
import threading

import numpy as np
import pytest

from promptgraph.embedding import (
    EmbeddingCache,
    EmbeddingError,
    HttpEmbeddingProvider,
    PairEmbedding,
    StubEmbeddingProvider,
    embed_records,
)


def cosine(u, v):
    return float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))


class TestStubProvider:
    def test_deterministic_text(self):
        stub = StubEmbeddingProvider()
        assert np.array_equal(stub.embed_text("a red cat"), stub.embed_text("a red cat"))

    def test_deterministic_image(self):
        stub = StubEmbeddingProvider()
        assert np.array_equal(stub.embed_image(b"pixels"), stub.embed_image(b"pixels"))

    def test_unit_norm_512(self):
        stub = StubEmbeddingProvider()
        t = stub.embed_text("storm waves at dusk")
        i = stub.embed_image(b"\x89PNG fake")
        assert t.shape == (512,) and i.shape == (512,)
        assert np.linalg.norm(t) == pytest.approx(1.0)
        assert np.linalg.norm(i) == pytest.approx(1.0)

    def test_shared_tokens_raise_similarity(self):
        stub = StubEmbeddingProvider()
        base = stub.embed_text("a b c d e")
        close = stub.embed_text("a b c d x")
        far = stub.embed_text("v w x y z")
        assert cosine(base, close) > cosine(base, far)

    def test_weight_syntax_does_not_change_vector(self):
        stub = StubEmbeddingProvider()
        assert np.array_equal(
            stub.embed_text("(flowers:1.3) vase"), stub.embed_text("flowers vase")
        )

    def test_empty_text_has_a_vector(self):
        v = StubEmbeddingProvider().embed_text("")
        assert np.linalg.norm(v) == pytest.approx(1.0)


class _EmbedHandler(http.server.BaseHTTPRequestHandler):
    dimension = 512
    fail = False

    def do_POST(self):
        if self.fail:
            self.send_response(500)
            self.end_headers()
            return
        length = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(length))
        self.server.last_request = body  # type: ignore[attr-defined]

        def vec(seed):
            rng = np.random.default_rng(seed)
            v = rng.standard_normal(self.dimension)
            return (v / np.linalg.norm(v)).tolist()

        out = {
            "text_vecs": [vec(1000 + i) for i in range(len(body["texts"]))],
            "image_vecs": [vec(2000 + i) for i in range(len(body["images"]))],
        }
        data = json.dumps(out).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def embed_server():
    server = http.server.HTTPServer(("127.0.0.1", 0), _EmbedHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    _EmbedHandler.fail = False
    yield f"http://127.0.0.1:{server.server_address[1]}/embed", server
    server.shutdown()


class TestHttpProvider:
    def test_protocol_roundtrip(self, embed_server):
        url, server = embed_server
        provider = HttpEmbeddingProvider(url)
        texts = ["a cat", "a dog"]
        images = [b"img-one", b"img-two", b"img-three"]
        text_vecs, image_vecs = provider.embed(texts, images)
        assert len(text_vecs) == 2 and len(image_vecs) == 3
        assert all(v.shape == (512,) for v in text_vecs + image_vecs)
        sent = server.last_request
        assert sent["texts"] == texts
        assert sent["images"] == [base64.b64encode(b).decode() for b in images]

    def test_server_error_raises(self, embed_server):
        url, _ = embed_server
        _EmbedHandler.fail = True
        with pytest.raises(EmbeddingError):
            HttpEmbeddingProvider(url).embed(["x"], [])

    def test_unreachable_raises(self):
        provider = HttpEmbeddingProvider("http://127.0.0.1:9/none", timeout=0.2)
        with pytest.raises(EmbeddingError):
            provider.embed(["x"], [])


class TestEmbedRecords:
    def test_one_pair_per_image_sharing_text_vec(self):
        stub = StubEmbeddingProvider()
        out = embed_records(
            [("a cat", [("i1", b"one"), ("i2", b"two")])], stub
        )
        assert [e.image_id for e in out] == ["i1", "i2"]
        assert np.array_equal(out[0].text_vec, out[1].text_vec)
        assert not np.array_equal(out[0].image_vec, out[1].image_vec)

    def test_duplicate_bytes_hit_cache(self):
        calls = []

        class CountingStub(StubEmbeddingProvider):
            def embed(self, texts, images):
                calls.append((list(texts), list(images)))
                return super().embed(texts, images)

        cache = EmbeddingCache()
        provider = CountingStub()
        first = embed_records([("p", [("i1", b"same")])], provider, cache=cache)
        second = embed_records([("p", [("i2", b"same")])], provider, cache=cache)
        assert np.array_equal(first[0].image_vec, second[0].image_vec)
        assert len(calls) == 1  # second call was served entirely from cache

    def test_provider_failure_surfaces_record_ids(self):
        class Broken:
            dimension = 512

            def embed(self, texts, images):
                raise EmbeddingError("boom")

        with pytest.raises(EmbeddingError) as exc:
            embed_records([("p", [("i1", b"x")])], Broken())
        assert exc.value.record_ids == ("i1",)

    def test_explicit_fallback_degrades_instead(self):
        class Broken:
            dimension = 512

            def embed(self, texts, images):
                raise EmbeddingError("boom")

        out = embed_records(
            [("p", [("i1", b"x")])], Broken(), fallback=StubEmbeddingProvider()
        )
        assert out[0].degraded is True
        assert np.linalg.norm(out[0].image_vec) == pytest.approx(1.0)


def test_pair_embedding_rejects_bad_vectors():
    good = np.zeros(512)
    with pytest.raises(ValueError):
        PairEmbedding("i", good, np.zeros(256))
    bad = np.zeros(512)
    bad[0] = np.nan
    with pytest.raises(ValueError):
        PairEmbedding("i", good, bad)
