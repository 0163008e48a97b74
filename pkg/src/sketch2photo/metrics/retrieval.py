"""Retrieval evaluation: rank a gallery by cosine distance to each query.

Items are (id, image) pairs; a query's ground-truth match is the gallery item
with the same id (the only place any pairing is used, and only for scoring).
An optional translation callable maps queries (or the gallery) through the
trained generators before feature extraction, for cross-domain retrieval.
"""

from dataclasses import dataclass

import numpy as np


def cosine_distance(u: np.ndarray, v: np.ndarray, eps: float = 1e-12) -> float:
    """1 − cos(u, v), guarding zero vectors."""
    u = np.asarray(u, dtype=np.float64).reshape(-1)
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    denom = max(np.linalg.norm(u) * np.linalg.norm(v), eps)
    return float(1.0 - (u @ v) / denom)


@dataclass(frozen=True)
class RetrievalResult:
    query_ids: tuple
    ranked_ids: tuple        # per query: gallery ids, nearest first
    ranked_distances: tuple  # per query: distances, non-decreasing
    accuracy: dict           # k -> fraction of queries with the true id in top-k

    def rank_of_truth(self, query_index: int) -> int:
        """1-based rank of the ground-truth gallery item for one query."""
        qid = self.query_ids[query_index]
        return self.ranked_ids[query_index].index(qid) + 1


def retrieve(queries, gallery, extractor, k_list=(1, 5, 10, 20),
             translate=None, translate_side: str = "queries",
             gallery_extractor=None) -> RetrievalResult:
    """Rank the gallery for every query and score top-k accuracy.

    queries/gallery: sequences of (item_id, image). ``translate`` (if given)
    is applied to each image on ``translate_side`` before extraction.
    ``gallery_extractor`` lets the two domains use different embeddings
    (e.g. a ResNet pair trained per domain); it defaults to ``extractor``.
    """
    queries = list(queries)
    gallery = list(gallery)
    if not queries:
        raise ValueError("no queries")
    if not gallery:
        raise ValueError("empty gallery")
    if translate_side not in ("queries", "gallery"):
        raise ValueError(f"translate_side must be 'queries' or 'gallery', "
                         f"got {translate_side!r}")
    k_list = tuple(int(k) for k in k_list)
    if not k_list or any(k <= 0 for k in k_list):
        raise ValueError(f"bad k_list {k_list!r}")

    query_ids = [str(i) for i, _ in queries]
    gallery_ids = [str(i) for i, _ in gallery]
    missing = set(query_ids) - set(gallery_ids)
    if missing:
        raise ValueError(f"queries lack ground-truth gallery items: {sorted(missing)[:5]}")

    query_images = [img for _, img in queries]
    gallery_images = [img for _, img in gallery]
    if translate is not None:
        if translate_side == "queries":
            query_images = [translate(img) for img in query_images]
        else:
            gallery_images = [translate(img) for img in gallery_images]

    query_feats = np.asarray(extractor(query_images), dtype=np.float64)
    gallery_feats = np.asarray(
        (gallery_extractor or extractor)(gallery_images), dtype=np.float64)
    if query_feats.ndim != 2 or gallery_feats.ndim != 2:
        raise ValueError("extractor must return n×d feature arrays")
    if query_feats.shape[1] != gallery_feats.shape[1]:
        raise ValueError("query/gallery feature dimensions differ")

    ranked_ids, ranked_distances = [], []
    for qf in query_feats:
        distances = np.array([cosine_distance(qf, gf) for gf in gallery_feats])
        order = np.argsort(distances, kind="stable")
        ranked_ids.append(tuple(gallery_ids[i] for i in order))
        ranked_distances.append(tuple(float(distances[i]) for i in order))

    accuracy = {}
    for k in k_list:
        hits = sum(1 for qid, ids in zip(query_ids, ranked_ids) if qid in ids[:k])
        accuracy[k] = hits / len(query_ids)

    return RetrievalResult(
        query_ids=tuple(query_ids),
        ranked_ids=tuple(ranked_ids),
        ranked_distances=tuple(ranked_distances),
        accuracy=accuracy,
    )
