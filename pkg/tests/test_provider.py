import socket
import threading

import numpy as np
import pytest

from ctgs.catalog import build_catalog
from ctgs.errors import CatalogMismatch, MalformedDistribution, ProviderUnreachable
from ctgs.models import ProviderHandle, train_ngram
from ctgs.provider import ModelServer, ProviderModel, fetch_distribution


@pytest.fixture
def served_model():
    cat = build_catalog(["a", "b", "c"])
    model = train_ngram([0, 1, 2, 0, 1], cat, order=2, k=0.5)
    server = ModelServer(model)
    server.start_background()
    yield model, server
    server.shutdown()
    server.server_close()


def test_round_trip_matches_local(served_model):
    model, server = served_model
    remote = ProviderModel(server.handle, model.catalog)
    for ctx in ([], [0], [1, 2]):
        assert np.allclose(
            remote.next_distribution(ctx).probs,
            model.next_distribution(ctx).probs,
            atol=1e-12,
        )
    remote.close()


def test_session_over_provider_matches_local(served_model):
    from ctgs.decoding import SamplingParams, Session

    model, server = served_model
    remote = ProviderModel(server.handle, model.catalog)
    local_out = Session(
        model.catalog, model, sampling=SamplingParams.with_temperature(1.0), seed=6
    ).generate(8)
    remote_out = Session(
        model.catalog, remote, sampling=SamplingParams.with_temperature(1.0), seed=6
    ).generate(8)
    assert local_out == remote_out
    remote.close()


def test_one_shot_fetch(served_model):
    model, server = served_model
    dist = fetch_distribution(server.handle, [0], catalog_size=3)
    assert abs(dist.probs.sum() - 1.0) < 1e-9


def test_checksum_mismatch_rejected(served_model):
    model, server = served_model
    bad = ProviderHandle(server.handle.host, server.handle.port, "deadbeef")
    with pytest.raises(CatalogMismatch):
        fetch_distribution(bad, [0])


def test_handle_catalog_mismatch_local(served_model):
    model, server = served_model
    other = build_catalog(["x", "y", "z"])
    with pytest.raises(CatalogMismatch):
        ProviderModel(server.handle, other)


def test_unreachable():
    with pytest.raises(ProviderUnreachable):
        fetch_distribution(ProviderHandle("127.0.0.1", 1, "x"), [0])


def _stub_server(lines):
    """Accept one connection, answer HELLO with OK, then send each line."""
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    sock.listen(1)

    def run():
        conn, _ = sock.accept()
        fh = conn.makefile("rb")
        fh.readline()  # HELLO
        conn.sendall(b"OK\n")
        for line in lines:
            fh.readline()  # NEXT
            conn.sendall(line)
        conn.close()

    threading.Thread(target=run, daemon=True).start()
    return sock.getsockname()[1], sock


def test_wrong_length_rejected():
    good = " ".join(str(np.log(0.25)) for _ in range(4))
    port, sock = _stub_server([f"DIST {good}\n".encode()])
    try:
        with pytest.raises(MalformedDistribution):
            fetch_distribution(ProviderHandle("127.0.0.1", port, "x"), [0], catalog_size=3)
    finally:
        sock.close()


def test_unnormalized_rejected():
    bad = " ".join(str(np.log(0.5)) for _ in range(3))  # sums to 1.5
    port, sock = _stub_server([f"DIST {bad}\n".encode()])
    try:
        with pytest.raises(MalformedDistribution):
            fetch_distribution(ProviderHandle("127.0.0.1", port, "x"), [0], catalog_size=3)
    finally:
        sock.close()


def test_near_one_renormalized():
    probs = np.asarray([0.5, 0.25, 0.25]) * (1 + 5e-5)  # within 1e-4
    body = " ".join(str(x) for x in np.log(probs))
    port, sock = _stub_server([f"DIST {body}\n".encode()])
    try:
        dist = fetch_distribution(ProviderHandle("127.0.0.1", port, "x"), [0], catalog_size=3)
        assert abs(dist.probs.sum() - 1.0) < 1e-12
    finally:
        sock.close()


def test_err_reply_surfaces():
    port, sock = _stub_server([b"ERR no model loaded\n"])
    try:
        with pytest.raises(MalformedDistribution):
            fetch_distribution(ProviderHandle("127.0.0.1", port, "x"), [0])
    finally:
        sock.close()
