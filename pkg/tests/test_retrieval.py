import numpy as np
import pytest

from sketch2photo.metrics.retrieval import RetrievalResult, cosine_distance, retrieve


def vector_extractor(images):
    return np.stack([np.asarray(im, dtype=np.float64).reshape(-1)
                     for im in images])


def brute_force_ranking(query_vec, gallery):
    """Independent oracle: sort gallery ids by cosine distance to the query."""
    scored = []
    for item_id, vec in gallery:
        u = np.asarray(query_vec, dtype=np.float64)
        v = np.asarray(vec, dtype=np.float64)
        d = 1.0 - (u @ v) / max(np.linalg.norm(u) * np.linalg.norm(v), 1e-12)
        scored.append((d, str(item_id)))
    scored.sort(key=lambda t: t[0])
    return [item_id for _, item_id in scored]


def make_gallery(rng, n=20, d=6):
    return [(f"item{i:02d}", rng.standard_normal(d)) for i in range(n)]


class TestCosineDistance:
    def test_anchors(self):
        assert cosine_distance([1, 0], [1, 0]) == pytest.approx(0.0)
        assert cosine_distance([1, 0], [0, 1]) == pytest.approx(1.0)
        assert cosine_distance([1, 0], [-1, 0]) == pytest.approx(2.0)

    def test_scale_invariant(self):
        rng = np.random.default_rng(0)
        u, v = rng.standard_normal(5), rng.standard_normal(5)
        assert cosine_distance(u, v) == pytest.approx(
            cosine_distance(3.7 * u, 0.2 * v), abs=1e-12)

    def test_zero_vector_guarded(self):
        assert np.isfinite(cosine_distance(np.zeros(4), np.ones(4)))


class TestRetrieve:
    def test_matches_brute_force_ranking(self):
        rng = np.random.default_rng(1)
        gallery = make_gallery(rng)
        queries = [(i, v + 0.1 * rng.standard_normal(v.shape))
                   for i, v in gallery[:5]]
        result = retrieve(queries, gallery, vector_extractor, k_list=(1, 5))
        for qi, (_, qvec) in enumerate(queries):
            assert list(result.ranked_ids[qi]) == brute_force_ranking(qvec, gallery)

    def test_distances_non_decreasing(self):
        rng = np.random.default_rng(2)
        gallery = make_gallery(rng)
        result = retrieve(gallery[:4], gallery, vector_extractor)
        for dists in result.ranked_distances:
            assert list(dists) == sorted(dists)

    def test_exact_query_ranks_first_and_topk_is_monotone(self):
        rng = np.random.default_rng(3)
        gallery = make_gallery(rng)
        result = retrieve(gallery, gallery, vector_extractor,
                          k_list=(1, 5, 10, 20))
        assert result.accuracy == {1: 1.0, 5: 1.0, 10: 1.0, 20: 1.0}
        for qi in range(len(gallery)):
            assert result.rank_of_truth(qi) == 1
        ks = sorted(result.accuracy)
        accs = [result.accuracy[k] for k in ks]
        assert accs == sorted(accs)

    def test_accuracy_counts_by_hand(self):
        # 2-D gallery on the axes; the query for "b" points at "a"
        gallery = [("a", np.array([1.0, 0.0])), ("b", np.array([0.0, 1.0]))]
        queries = [("a", np.array([1.0, 0.1])), ("b", np.array([1.0, 0.0]))]
        result = retrieve(queries, gallery, vector_extractor, k_list=(1, 2))
        assert result.accuracy == {1: 0.5, 2: 1.0}
        assert result.rank_of_truth(0) == 1
        assert result.rank_of_truth(1) == 2

    def test_translation_applies_to_queries(self):
        # queries are negated copies; translating them back restores rank 1
        rng = np.random.default_rng(4)
        gallery = make_gallery(rng)
        flipped = [(i, -v) for i, v in gallery]
        raw = retrieve(flipped, gallery, vector_extractor, k_list=(1,))
        fixed = retrieve(flipped, gallery, vector_extractor, k_list=(1,),
                         translate=lambda v: -v)
        assert raw.accuracy[1] < 1.0
        assert fixed.accuracy[1] == 1.0

    def test_translation_applies_to_gallery_side(self):
        rng = np.random.default_rng(5)
        gallery = make_gallery(rng)
        flipped = [(i, -v) for i, v in gallery]
        fixed = retrieve(gallery, flipped, vector_extractor, k_list=(1,),
                         translate=lambda v: -v, translate_side="gallery")
        assert fixed.accuracy[1] == 1.0

    def test_separate_gallery_extractor(self):
        # gallery "images" are reversed one-hots: retrieval only works when
        # the dedicated gallery extractor un-reverses them
        n = 6
        eye = np.eye(n)
        queries = [(f"q{i}", eye[i]) for i in range(n)]
        gallery = [(f"q{i}", eye[n - 1 - i]) for i in range(n)]
        flip = lambda images: np.flip(vector_extractor(images), axis=1)
        raw = retrieve(queries, gallery, vector_extractor, k_list=(1,))
        fixed = retrieve(queries, gallery, vector_extractor, k_list=(1,),
                         gallery_extractor=flip)
        assert raw.accuracy[1] == 0.0
        assert fixed.accuracy[1] == 1.0

    def test_stable_tie_break_keeps_gallery_order(self):
        gallery = [("a", np.array([1.0, 0.0])), ("b", np.array([2.0, 0.0]))]
        result = retrieve([("a", np.array([3.0, 0.0]))], gallery,
                          vector_extractor, k_list=(1,))
        assert result.ranked_ids[0] == ("a", "b")


class TestRetrieveValidation:
    def test_missing_ground_truth_rejected(self):
        gallery = [("a", np.ones(2))]
        with pytest.raises(ValueError, match="ground-truth"):
            retrieve([("zzz", np.ones(2))], gallery, vector_extractor)

    def test_empty_inputs_rejected(self):
        gallery = [("a", np.ones(2))]
        with pytest.raises(ValueError, match="no queries"):
            retrieve([], gallery, vector_extractor)
        with pytest.raises(ValueError, match="empty gallery"):
            retrieve(gallery, [], vector_extractor)

    def test_bad_k_list_rejected(self):
        gallery = [("a", np.ones(2))]
        with pytest.raises(ValueError, match="k_list"):
            retrieve(gallery, gallery, vector_extractor, k_list=(0,))

    def test_bad_translate_side_rejected(self):
        gallery = [("a", np.ones(2))]
        with pytest.raises(ValueError, match="translate_side"):
            retrieve(gallery, gallery, vector_extractor,
                     translate_side="both")

    def test_feature_dimension_mismatch_rejected(self):
        gallery = [("a", np.ones(2))]
        padding = lambda images: np.ones((len(images), 9))
        with pytest.raises(ValueError, match="dimensions differ"):
            retrieve(gallery, gallery, vector_extractor,
                     gallery_extractor=padding)

    def test_result_type(self):
        gallery = [("a", np.ones(2)), ("b", np.array([1.0, 0.5]))]
        result = retrieve(gallery, gallery, vector_extractor, k_list=(1,))
        assert isinstance(result, RetrievalResult)
        assert result.query_ids == ("a", "b")
