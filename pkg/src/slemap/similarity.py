"""Document similarity and similarity-matrix construction.

Document similarity pairs up statements (each statement in at most one pair),
takes the best total statement similarity over all such pairings, and divides
by the larger statement count.  Unpaired statements contribute nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .dictionary import TransformationDictionary, empty_dictionary
from .text import DEFAULT_MAX_TOKENS, Document, Statement
from .transforms import TransformWeights, statement_similarity


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric m x m document similarities in [0, 1] with unit diagonal."""

    values: np.ndarray
    ids: tuple[str, ...]

    def __post_init__(self) -> None:
        v = self.values
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] != len(self.ids):
            raise ValueError("similarity matrix must be square and match ids")

    @property
    def m(self) -> int:
        return len(self.ids)


def _doc_key(doc: Document) -> tuple:
    # Similarity only sees the statement multiset, so a sorted token-tuple
    # key lets duplicate documents share one computation.
    return tuple(sorted(st.tokens for st in doc.statements))


class SimilarityComputer:
    """Caches statement- and document-level similarities across many pairs.

    All methods are pure functions of the inputs; the caches only memoize.
    Results are identical whether pairs are evaluated one at a time or in
    bulk, in any order.
    """

    def __init__(self, weights: TransformWeights | None = None,
                 dictionary: TransformationDictionary | None = None,
                 max_tokens: int = DEFAULT_MAX_TOKENS):
        self.weights = weights or TransformWeights.default()
        self.dictionary = dictionary or empty_dictionary()
        self.max_tokens = max_tokens
        self._stmt_cache: dict[tuple, float] = {}
        self._doc_cache: dict[tuple, float] = {}

    def statement_similarity(self, a: Statement, b: Statement) -> float:
        ka, kb = a.tokens, b.tokens
        key = (ka, kb) if ka <= kb else (kb, ka)
        val = self._stmt_cache.get(key)
        if val is None:
            val = statement_similarity(a, b, self.weights, self.dictionary, self.max_tokens)
            self._stmt_cache[key] = val
        return val

    def document_similarity(self, d1: Document, d2: Document) -> float:
        if d1.is_sentinel or d2.is_sentinel:
            return 0.0
        k1, k2 = _doc_key(d1), _doc_key(d2)
        key = (k1, k2) if k1 <= k2 else (k2, k1)
        val = self._doc_cache.get(key)
        if val is None:
            val = self._document_similarity_uncached(d1, d2)
            self._doc_cache[key] = val
        return val

    def _document_similarity_uncached(self, d1: Document, d2: Document) -> float:
        s1, s2 = d1.statements, d2.statements
        if len(s1) > len(s2):
            s1, s2 = s2, s1
        r1, r2 = len(s1), len(s2)
        sims = [[self.statement_similarity(x, y) for y in s2] for x in s1]
        if r1 == 1:
            best = max(sims[0])
        else:
            best = 0.0
            for perm in permutations(range(r2), r1):
                total = 0.0
                for i in range(r1):
                    total += sims[i][perm[i]]
                if total > best:
                    best = total
        return best / r2

    def matrix(self, corpus: list[Document]) -> SimilarityMatrix:
        """Full similarity matrix: upper triangle computed, mirrored, unit diagonal.

        Duplicate documents (same statement multiset) are collapsed before the
        pairwise pass, which leaves the result identical but much cheaper on
        template-heavy corpora.
        """
        m = len(corpus)
        if m < 2:
            raise ValueError("need at least 2 documents")
        keys = [_doc_key(d) for d in corpus]
        uniq_index: dict[tuple, int] = {}
        reps: list[Document] = []
        inverse = np.empty(m, dtype=np.intp)
        for i, key in enumerate(keys):
            u = uniq_index.get(key)
            if u is None:
                u = len(reps)
                uniq_index[key] = u
                reps.append(corpus[i])
            inverse[i] = u
        n_u = len(reps)
        su = np.eye(n_u)
        for i in range(n_u):
            for j in range(i + 1, n_u):
                su[i, j] = su[j, i] = self.document_similarity(reps[i], reps[j])
        values = su[np.ix_(inverse, inverse)]
        # Distinct empty documents share a dedupe key but are not similar:
        # sentinels score 0 against everything except themselves.
        sentinel = np.array([d.is_sentinel for d in corpus], dtype=bool)
        if sentinel.any():
            values[sentinel, :] = 0.0
            values[:, sentinel] = 0.0
        np.fill_diagonal(values, 1.0)
        return SimilarityMatrix(values, tuple(d.id for d in corpus))

    def rows(self, new_docs: list[Document], corpus: list[Document]) -> np.ndarray:
        """Similarities of each new document against every corpus document."""
        keys = [_doc_key(d) for d in corpus]
        uniq_index: dict[tuple, int] = {}
        reps = []
        inverse = np.empty(len(corpus), dtype=np.intp)
        for i, key in enumerate(keys):
            u = uniq_index.get(key)
            if u is None:
                u = len(reps)
                uniq_index[key] = u
                reps.append(corpus[i])
            inverse[i] = u
        out = np.empty((len(new_docs), len(corpus)))
        row_cache: dict[tuple, np.ndarray] = {}
        for r, nd in enumerate(new_docs):
            nk = _doc_key(nd)
            row_u = row_cache.get(nk)
            if row_u is None:
                row_u = np.array([self.document_similarity(nd, rep) for rep in reps])
                row_cache[nk] = row_u
            out[r] = row_u[inverse]
        return out


def document_similarity(d1: Document, d2: Document,
                        weights: TransformWeights | None = None,
                        dct: TransformationDictionary | None = None,
                        max_tokens: int = DEFAULT_MAX_TOKENS) -> float:
    return SimilarityComputer(weights, dct, max_tokens).document_similarity(d1, d2)


def build_similarity_matrix(corpus: list[Document],
                            weights: TransformWeights | None = None,
                            dct: TransformationDictionary | None = None,
                            max_tokens: int = DEFAULT_MAX_TOKENS) -> SimilarityMatrix:
    return SimilarityComputer(weights, dct, max_tokens).matrix(corpus)
