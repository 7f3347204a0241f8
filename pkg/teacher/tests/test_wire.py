"""Protocol conformance for the serving loop, including the end-to-end
check against the primary package's remote-oracle client."""

import json
import subprocess
import sys

import numpy as np
import pytest

from teacher_adapter.training import ServedTeacher, TeacherSpec, train_teacher

from test_training import separable_data, write_csv


@pytest.fixture(scope="module")
def rf_model(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("model")
    x, y = separable_data(300, seed=1)
    data = tmp / "train.csv"
    write_csv(data, x, y)
    out = tmp / "rf.joblib"
    train_teacher(TeacherSpec(kind="random-forest", seed=2), data, out)
    return out


class StdioClient:
    def __init__(self, model_path):
        self.proc = subprocess.Popen(
            [sys.executable, "-m", "teacher_adapter.cli", "serve",
             "--model", str(model_path), "--transport", "stdio"],
            stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True)

    def send_line(self, text):
        self.proc.stdin.write(text + "\n")
        self.proc.stdin.flush()
        return json.loads(self.proc.stdout.readline())

    def send(self, obj):
        return self.send_line(json.dumps(obj))

    def close(self):
        if self.proc.poll() is None:
            self.proc.stdin.write(json.dumps({"op": "bye"}) + "\n")
            self.proc.stdin.flush()
        return self.proc.wait(timeout=10)


@pytest.fixture
def client(rf_model):
    c = StdioClient(rf_model)
    yield c
    c.close()


class TestProtocol:
    def test_hello(self, client):
        reply = client.send({"op": "hello"})
        assert reply == {"op": "hello", "dim": 2, "name": "random-forest"}

    def test_predict_echoes_id_and_length(self, client):
        reply = client.send({"op": "predict", "id": 42,
                             "x": [[0.5, 0.0], [-0.5, 0.0]]})
        assert reply["id"] == 42
        assert len(reply["y"]) == 2
        assert set(reply["y"]) <= {-1, 1}

    def test_predict_empty_batch(self, client):
        reply = client.send({"op": "predict", "id": 7, "x": []})
        assert reply == {"id": 7, "y": []}

    def test_malformed_request_keeps_serving(self, client):
        reply = client.send_line("this is not json")
        assert reply["id"] is None and "error" in reply
        follow_up = client.send({"op": "predict", "id": 1, "x": [[0.1, 0.2]]})
        assert follow_up["id"] == 1 and "y" in follow_up

    def test_feature_mismatch_is_error_response(self, client):
        reply = client.send({"op": "predict", "id": 9, "x": [[1.0, 2.0, 3.0]]})
        assert reply["id"] == 9 and "error" in reply
        follow_up = client.send({"op": "predict", "id": 10, "x": [[0.0, 0.0]]})
        assert follow_up["id"] == 10 and "y" in follow_up

    def test_unknown_op(self, client):
        reply = client.send({"op": "train", "id": 3})
        assert "error" in reply

    def test_stateless_between_predicts(self, client):
        batch = {"op": "predict", "id": 1,
                 "x": np.random.default_rng(5).uniform(-2, 2, (50, 2)).tolist()}
        a = client.send(batch)
        b = client.send(batch)
        assert a["y"] == b["y"]

    def test_bye_exits_zero(self, rf_model):
        c = StdioClient(rf_model)
        assert c.close() == 0


class TestAcceptanceCriterion11:
    def test_served_labels_match_in_process_with_exact_budget(self, rf_model):
        bcopy = pytest.importorskip("bcopy")
        from bcopy.oracle import connect_remote_oracle, with_counting

        remote = connect_remote_oracle(
            {"transport": "stdio",
             "cmd": [sys.executable, "-m", "teacher_adapter.cli", "serve",
                     "--model", str(rf_model), "--transport", "stdio"]},
            dim=2)
        counting = with_counting(remote)
        pts = np.random.default_rng(11).uniform(-3, 3, size=(1000, 2))
        served = counting.classify(pts)
        local = ServedTeacher(rf_model).predict(pts)
        np.testing.assert_array_equal(served, local)
        assert counting.budget.calls == 1000
        remote.close()
        print("[criterion 11] PASS - 1000 served labels match in-process "
              "predictions; budget counted exactly")

    def test_malformed_request_does_not_kill_server(self, client):
        bad = client.send_line("{broken json")
        assert "error" in bad
        reply = client.send({"op": "predict", "id": 5, "x": [[0.3, 0.3]]})
        assert reply["id"] == 5 and len(reply["y"]) == 1
