"""Blind study construction, scoring flow, durability, and result assembly."""

import json

import pytest

from precise.grading import (
    ARM_GENERATED,
    ARM_ORIGINAL,
    RELIABILITY_RUBRIC,
    UNDERSTANDABILITY_RUBRIC,
    BlindingError,
    DuplicateScoreError,
    GradingStore,
    InvalidScoreError,
    UnknownItemError,
    UnknownStudyError,
    UnknownTokenError,
    build_study,
    replay_log,
    rubric_by_kind,
)
from precise.simplify import SimplifiedPair

# Text chosen so that arm names never appear in any grader-visible payload:
# the byte-scan assertions below depend on it.
_PAIR_TEXTS = [
    ("rid-1", "Cardiomegaly with small pleural effusion.", "An enlarged heart with fluid at the chest base."),
    ("rid-2", "No acute osseous abnormality is seen.", "Your bones look fine on this X-ray."),
    ("rid-3", "Bibasilar atelectasis is noted.", "Small areas at the lung bottoms have collapsed."),
    ("rid-4", "The mediastinum is unremarkable.", "The middle of the chest looks healthy."),
    ("rid-5", "Right upper lobe opacity suggests pneumonia.", "A cloudy spot may be an infection."),
    ("rid-6", "Degenerative changes of the spine are present.", "The spine shows wear-and-tear changes."),
]


def _pairs(n=3):
    return [
        SimplifiedPair(
            report_id=rid,
            original_text=orig,
            generated_text=gen,
            backend_id="mock",
            model_id="mock",
            created_at="2024-01-01T00:00:00+00:00",
            attempt_count=1,
        )
        for rid, orig, gen in _PAIR_TEXTS[:n]
    ]


class TestBuildStudy:
    def test_understandability_interleaves_both_arms(self):
        study = build_study(_pairs(3), UNDERSTANDABILITY_RUBRIC, ["t1"], seed=5)
        assert len(study.items) == 6
        by_ref = {}
        for item in study.items:
            by_ref.setdefault(item.pair_ref, []).append(item.hidden_arm)
            assert item.companion_text is None
        assert set(by_ref) == {"rid-1", "rid-2", "rid-3"}
        for arms in by_ref.values():
            assert sorted(arms) == [ARM_GENERATED, ARM_ORIGINAL]
        texts = {item.text for item in study.items}
        expected = {t for _, orig, gen in _PAIR_TEXTS[:3] for t in (orig, gen)}
        assert texts == expected

    def test_reliability_keeps_corpus_order_with_companion(self):
        study = build_study(_pairs(3), RELIABILITY_RUBRIC, ["t1"], seed=5)
        assert len(study.items) == 3
        assert [i.pair_ref for i in study.items] == ["rid-1", "rid-2", "rid-3"]
        for item, (_, orig, gen) in zip(study.items, _PAIR_TEXTS):
            assert item.hidden_arm == ARM_GENERATED
            assert item.text == gen
            assert item.companion_text == orig

    def test_same_seed_reproduces_the_study(self):
        a = build_study(_pairs(6), UNDERSTANDABILITY_RUBRIC, ["t1", "t2"], seed=99)
        b = build_study(_pairs(6), UNDERSTANDABILITY_RUBRIC, ["t1", "t2"], seed=99)
        assert a.items == b.items
        assert a.reveal_key == b.reveal_key
        assert a.study_id != b.study_id  # identity is fresh each time

    def test_different_seeds_shuffle_differently(self):
        orders = {
            tuple(i.text for i in build_study(_pairs(6), UNDERSTANDABILITY_RUBRIC, ["t"], seed=s).items)
            for s in range(4)
        }
        assert len(orders) > 1

    def test_item_ids_are_unique_and_opaque(self):
        study = build_study(_pairs(6), UNDERSTANDABILITY_RUBRIC, ["t1"], seed=3)
        ids = [i.item_id for i in study.items]
        assert len(set(ids)) == len(ids)
        for item_id in ids:
            assert len(item_id) == 12
            int(item_id, 16)  # hex, no structure

    def test_validation(self):
        with pytest.raises(ValueError):
            build_study([], UNDERSTANDABILITY_RUBRIC, ["t1"], seed=0)
        with pytest.raises(ValueError):
            build_study(_pairs(2), UNDERSTANDABILITY_RUBRIC, [], seed=0)
        with pytest.raises(ValueError):
            build_study(_pairs(2), UNDERSTANDABILITY_RUBRIC, ["t1", "t1"], seed=0)
        with pytest.raises(ValueError):
            build_study(_pairs(2) + _pairs(1), UNDERSTANDABILITY_RUBRIC, ["t1"], seed=0)

    def test_rubric_lookup(self):
        assert rubric_by_kind("reliability") is RELIABILITY_RUBRIC
        assert rubric_by_kind("understandability") is UNDERSTANDABILITY_RUBRIC
        with pytest.raises(ValueError):
            rubric_by_kind("vibes")

    def test_rubric_labels(self):
        assert [label for _, label, _ in RELIABILITY_RUBRIC.labels] == [
            "Unreliable",
            "Inconsistent",
            "Appropriate",
        ]
        assert UNDERSTANDABILITY_RUBRIC.label_for(2) == "Fully understandable"
        with pytest.raises(KeyError):
            UNDERSTANDABILITY_RUBRIC.label_for(5)


def _store(tmp_path, name="log.jsonl"):
    return GradingStore(tmp_path / name)


def _grade_everything(store, study, score_for_arm):
    state = store.get_study(study.study_id)
    for token in study.grader_tokens:
        for item in study.items:
            store.submit_score(
                study.study_id, token, item.item_id, score_for_arm(item.hidden_arm)
            )
    return state


class TestScoringFlow:
    def test_next_item_walks_every_item_once(self, tmp_path):
        store = _store(tmp_path)
        study = store.create_study(_pairs(2), UNDERSTANDABILITY_RUBRIC, ["tok-a"], seed=1)
        seen = []
        while True:
            view = store.next_item(study.study_id, "tok-a")
            if view is None:
                break
            seen.append(view["item_id"])
            assert view["position"] == len(seen)
            assert view["total"] == 4
            store.submit_score(study.study_id, "tok-a", view["item_id"], 1)
        assert seen == [i.item_id for i in study.items]

    def test_sequence_numbers_count_all_graders(self, tmp_path):
        store = _store(tmp_path)
        study = store.create_study(_pairs(1), UNDERSTANDABILITY_RUBRIC, ["a", "b"], seed=1)
        first = store.submit_score(study.study_id, "a", study.items[0].item_id, 2)
        second = store.submit_score(study.study_id, "b", study.items[0].item_id, 0)
        assert (first.sequence_number, second.sequence_number) == (1, 2)

    def test_duplicate_score_is_conflict_with_prior_sequence(self, tmp_path):
        store = _store(tmp_path)
        study = store.create_study(_pairs(1), UNDERSTANDABILITY_RUBRIC, ["a"], seed=1)
        item_id = study.items[0].item_id
        first = store.submit_score(study.study_id, "a", item_id, 2)
        with pytest.raises(DuplicateScoreError) as excinfo:
            store.submit_score(study.study_id, "a", item_id, 0)
        assert excinfo.value.prior_sequence == first.sequence_number
        assert f"(event {first.sequence_number})" in str(excinfo.value)
        # the rejected submission must not overwrite the stored score
        state = store.get_study(study.study_id)
        assert state.scores[("a", item_id)].score == 2

    @pytest.mark.parametrize("bad", [3, -1, "2", 1.0, True, None])
    def test_invalid_scores_rejected(self, tmp_path, bad):
        store = _store(tmp_path)
        study = store.create_study(_pairs(1), UNDERSTANDABILITY_RUBRIC, ["a"], seed=1)
        with pytest.raises(InvalidScoreError):
            store.submit_score(study.study_id, "a", study.items[0].item_id, bad)

    def test_unknown_study_token_and_item(self, tmp_path):
        store = _store(tmp_path)
        study = store.create_study(_pairs(1), UNDERSTANDABILITY_RUBRIC, ["a"], seed=1)
        with pytest.raises(UnknownStudyError):
            store.next_item("missing", "a")
        with pytest.raises(UnknownTokenError):
            store.next_item(study.study_id, "intruder")
        with pytest.raises(UnknownItemError):
            store.submit_score(study.study_id, "a", "000000000000", 1)

    def test_progress_uses_positional_grader_labels(self, tmp_path):
        store = _store(tmp_path)
        study = store.create_study(
            _pairs(2), UNDERSTANDABILITY_RUBRIC, ["secret-token-a", "secret-token-b"], seed=1
        )
        store.submit_score(study.study_id, "secret-token-a", study.items[0].item_id, 1)
        progress = store.progress(study.study_id)
        assert progress["state"] == "open"
        assert progress["scored"] == 1
        assert progress["total"] == 8
        assert progress["per_grader"] == {
            "grader_1": {"scored": 1, "total": 4},
            "grader_2": {"scored": 0, "total": 4},
        }
        assert "secret-token" not in json.dumps(progress)


class TestBlinding:
    def test_view_exposes_exactly_the_blinded_fields(self, tmp_path):
        store = _store(tmp_path)
        study = store.create_study(_pairs(3), UNDERSTANDABILITY_RUBRIC, ["tok"], seed=2)
        view = store.next_item(study.study_id, "tok")
        assert set(view) == {"item_id", "text", "position", "total"}

    def test_reliability_view_adds_companion_text(self, tmp_path):
        store = _store(tmp_path)
        study = store.create_study(_pairs(3), RELIABILITY_RUBRIC, ["tok"], seed=2)
        view = store.next_item(study.study_id, "tok")
        assert set(view) == {"item_id", "text", "position", "total", "companion_text"}
        assert view["companion_text"] == _PAIR_TEXTS[0][1]

    def test_no_arm_bytes_reach_an_understandability_grader(self, tmp_path):
        store = _store(tmp_path)
        study = store.create_study(_pairs(6), UNDERSTANDABILITY_RUBRIC, ["tok"], seed=7)
        payloads = []
        while True:
            view = store.next_item(study.study_id, "tok")
            if view is None:
                break
            payloads.append(json.dumps(view))
            store.submit_score(study.study_id, "tok", view["item_id"], 1)
        payloads.append(json.dumps(store.progress(study.study_id)))
        blob = "\n".join(payloads).lower()
        for marker in ("arm", "original", "generated", "hidden", "pair_ref", "reveal"):
            assert marker not in blob, f"grader payload leaks {marker!r}"
        for rid, _, _ in _PAIR_TEXTS:
            assert rid not in blob
        assert study.reveal_key not in blob

    def test_results_sealed_while_open(self, tmp_path):
        store = _store(tmp_path)
        study = store.create_study(_pairs(2), UNDERSTANDABILITY_RUBRIC, ["tok"], seed=3)
        with pytest.raises(BlindingError):
            store.results(study.study_id)
        with pytest.raises(BlindingError):
            store.results(study.study_id, reveal="wrong-key")

    def test_reveal_key_opens_early_and_is_audited(self, tmp_path):
        log = tmp_path / "log.jsonl"
        store = GradingStore(log)
        study = store.create_study(_pairs(2), UNDERSTANDABILITY_RUBRIC, ["tok"], seed=3)
        results = store.results(study.study_id, reveal=study.reveal_key)
        assert results["state"] == "open"
        events = [json.loads(line)["type"] for line in log.read_text().splitlines()]
        assert events == ["create_study", "reveal_access"]

    def test_completion_unseals_results(self, tmp_path):
        store = _store(tmp_path)
        study = store.create_study(_pairs(2), UNDERSTANDABILITY_RUBRIC, ["tok"], seed=3)
        _grade_everything(store, study, lambda arm: 2 if arm == ARM_GENERATED else 0)
        results = store.results(study.study_id)
        assert results["state"] == "complete"


class TestResults:
    def test_full_bundle_content(self, tmp_path):
        store = _store(tmp_path)
        study = store.create_study(
            _pairs(3), UNDERSTANDABILITY_RUBRIC, ["tok-a", "tok-b"], seed=42
        )
        _grade_everything(store, study, lambda arm: 2 if arm == ARM_GENERATED else 0)
        results = store.results(study.study_id)

        assert results["n_items"] == 6
        assert results["n_graders"] == 2
        assert results["graders"] == ["grader_1", "grader_2"]
        assert results["score_count"] == 12
        assert results["rubric"]["kind"] == "understandability"

        original = results["arms"][ARM_ORIGINAL]
        generated = results["arms"][ARM_GENERATED]
        assert original["counts"] == {"0": 6, "1": 0, "2": 0}
        assert generated["counts"] == {"0": 0, "1": 0, "2": 6}
        assert original["mean"] == 0.0
        assert generated["mean"] == 2.0
        assert generated["fractions"]["2"] == 1.0

        assert results["agreement"]["percent"] == [[1.0, 1.0], [1.0, 1.0]]
        assert results["agreement"]["kappa"] == [[1.0, 1.0], [1.0, 1.0]]

        mw = results["mann_whitney"]
        assert mw["method"] == "mann_whitney_exact"
        assert mw["p_value"] == pytest.approx(0.0021645021645021645, abs=1e-15)

        assert len(results["grid"]) == 6
        for row in results["grid"]:
            expected = 2 if row["arm"] == ARM_GENERATED else 0
            assert row["scores"] == {"grader_1": expected, "grader_2": expected}

    def test_disagreeing_graders_lower_the_agreement(self, tmp_path):
        store = _store(tmp_path)
        study = store.create_study(_pairs(2), UNDERSTANDABILITY_RUBRIC, ["a", "b"], seed=1)
        for item in study.items:
            store.submit_score(study.study_id, "a", item.item_id, 2)
            store.submit_score(study.study_id, "b", item.item_id, 0)
        results = store.results(study.study_id)
        assert results["agreement"]["percent"][0][1] == 0.0
        assert results["agreement"]["percent"][0][0] == 1.0

    def test_reliability_results_have_no_rank_test(self, tmp_path):
        store = _store(tmp_path)
        study = store.create_study(_pairs(3), RELIABILITY_RUBRIC, ["a"], seed=1)
        for item in study.items:
            store.submit_score(study.study_id, "a", item.item_id, 2)
        results = store.results(study.study_id)
        # only one arm exists, so there is nothing to compare
        assert results["mann_whitney"] is None
        assert results["arms"][ARM_GENERATED]["total"] == 3

    def test_partial_results_mark_missing_cells(self, tmp_path):
        store = _store(tmp_path)
        study = store.create_study(_pairs(2), UNDERSTANDABILITY_RUBRIC, ["a"], seed=1)
        store.submit_score(study.study_id, "a", study.items[0].item_id, 1)
        results = store.results(study.study_id, reveal=study.reveal_key)
        scores = [row["scores"]["grader_1"] for row in results["grid"]]
        assert scores.count(None) == 3


class TestDurability:
    def test_restart_replays_to_identical_state(self, tmp_path):
        log = tmp_path / "log.jsonl"
        store = GradingStore(log)
        study = store.create_study(_pairs(3), UNDERSTANDABILITY_RUBRIC, ["a", "b"], seed=11)
        store.submit_score(study.study_id, "a", study.items[0].item_id, 2)
        store.submit_score(study.study_id, "b", study.items[2].item_id, 1)
        before = store.progress(study.study_id)
        store.close()

        reopened = GradingStore(log)
        state = reopened.get_study(study.study_id)
        assert state.study == study
        assert reopened.progress(study.study_id) == before
        assert state.scores[("a", study.items[0].item_id)].score == 2
        # the duplicate guard survives the restart with the original sequence
        with pytest.raises(DuplicateScoreError) as excinfo:
            reopened.submit_score(study.study_id, "a", study.items[0].item_id, 0)
        assert excinfo.value.prior_sequence == 1

    def test_interrupted_study_can_be_finished_after_restart(self, tmp_path):
        log = tmp_path / "log.jsonl"
        store = GradingStore(log)
        study = store.create_study(_pairs(2), UNDERSTANDABILITY_RUBRIC, ["a"], seed=11)
        store.submit_score(study.study_id, "a", study.items[0].item_id, 1)
        store.close()

        reopened = GradingStore(log)
        while True:
            view = reopened.next_item(study.study_id, "a")
            if view is None:
                break
            reopened.submit_score(study.study_id, "a", view["item_id"], 1)
        assert reopened.progress(study.study_id)["state"] == "complete"

    def test_corrupt_tail_recovers_the_prefix(self, tmp_path, caplog):
        log = tmp_path / "log.jsonl"
        store = GradingStore(log)
        study = store.create_study(_pairs(2), UNDERSTANDABILITY_RUBRIC, ["a"], seed=11)
        store.submit_score(study.study_id, "a", study.items[0].item_id, 1)
        store.close()
        with open(log, "a") as fh:
            fh.write('{"type": "score", "study_id": "half-written')

        with caplog.at_level("WARNING"):
            states = replay_log(log)
        assert "line 3" in caplog.text
        state = states[study.study_id]
        assert len(state.scores) == 1

    def test_score_for_unknown_study_stops_the_replay(self, tmp_path, caplog):
        log = tmp_path / "log.jsonl"
        store = GradingStore(log)
        study = store.create_study(_pairs(1), UNDERSTANDABILITY_RUBRIC, ["a"], seed=1)
        store.close()
        orphan = {
            "type": "score",
            "study_id": "no-such-study",
            "grader_token": "a",
            "item_id": "x",
            "score": 1,
            "submitted_at": "t",
            "sequence_number": 1,
        }
        with open(log, "a") as fh:
            fh.write(json.dumps(orphan) + "\n")
        with caplog.at_level("WARNING"):
            states = replay_log(log)
        assert study.study_id in states
        assert "line 2" in caplog.text

    def test_missing_log_is_an_empty_store(self, tmp_path):
        assert replay_log(tmp_path / "never-written.jsonl") == {}

    def test_event_log_lines_are_valid_json(self, tmp_path):
        log = tmp_path / "log.jsonl"
        store = GradingStore(log)
        study = store.create_study(_pairs(2), RELIABILITY_RUBRIC, ["a"], seed=4)
        for item in study.items:
            store.submit_score(study.study_id, "a", item.item_id, 2)
        lines = log.read_text().splitlines()
        events = [json.loads(line) for line in lines]
        assert [e["type"] for e in events] == ["create_study", "score", "score"]
        assert events[1]["sequence_number"] == 1
        assert events[2]["sequence_number"] == 2
