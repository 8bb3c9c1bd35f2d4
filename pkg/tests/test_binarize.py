from pathlib import Path

import numpy as np
import pytest

from distparse.binarize import (
    EMPTY_LABEL,
    Internal,
    LabelError,
    StructureError,
    Terminal,
    binarize,
    debinarize,
)
from distparse.trees import Leaf, NaryTree, leaves, parse_bracketed, preprocess
from helpers import random_binary_tree, random_nary_tree

SAMPLE = Path(__file__).resolve().parent.parent / "data" / "sample_treebank.mrg"


def binary_leaves(tree):
    out = []
    work = [tree]
    while work:
        node = work.pop()
        if isinstance(node, Terminal):
            out.append(node)
        else:
            work.append(node.right)
            work.append(node.left)
    return out


class TestBinarize:
    def test_unary_chain_over_word(self):
        (tree,) = parse_bracketed("(S (VP (VB go)))")
        assert binarize(tree) == Terminal("go", "VB", "S+VP")

    def test_leftmost_split_of_ternary_node(self):
        (tree,) = parse_bracketed("(NP (DT a) (JJ b) (NN c))")
        assert binarize(tree) == Internal(
            "NP",
            Terminal("a", "DT"),
            Internal(EMPTY_LABEL, Terminal("b", "JJ"), Terminal("c", "NN")),
        )

    def test_already_binary_tree_keeps_shape(self):
        (tree,) = parse_bracketed("(S (NP (DT a) (NN b)) (VP (VBZ c) (NN d)))")
        result = binarize(tree)
        assert result == Internal(
            "S",
            Internal("NP", Terminal("a", "DT"), Terminal("b", "NN")),
            Internal("VP", Terminal("c", "VBZ"), Terminal("d", "NN")),
        )
        assert all(t.unary_label == EMPTY_LABEL for t in binary_leaves(result))

    def test_chain_above_phrase_collapses_into_label(self):
        (tree,) = parse_bracketed("(S (NP (DT a) (NN b)))")
        result = binarize(tree)
        assert isinstance(result, Internal)
        assert result.label == "S+NP"
        assert debinarize(result) == tree

    def test_internal_nodes_have_exactly_two_children(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            work = [binarize(random_nary_tree(rng))]
            while work:
                node = work.pop()
                if isinstance(node, Internal):
                    assert node.left is not None and node.right is not None
                    work.extend((node.left, node.right))

    def test_leaf_order_preserved(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            tree = random_nary_tree(rng)
            words = [leaf.word for leaf in leaves(tree)]
            assert [t.word for t in binary_leaves(binarize(tree))] == words

    def test_separator_in_label_rejected(self):
        tree = NaryTree("A+B", [Leaf("x", "T"), Leaf("y", "T")])
        with pytest.raises(LabelError):
            binarize(tree)

    def test_empty_marker_as_label_rejected(self):
        tree = NaryTree(EMPTY_LABEL, [Leaf("x", "T"), Leaf("y", "T")])
        with pytest.raises(LabelError):
            binarize(tree)


class TestDebinarize:
    def test_terminal_chain_expansion(self):
        assert debinarize(Terminal("go", "VB", "S+VP")) == parse_bracketed(
            "(S (VP (VB go)))"
        )[0]

    def test_bare_terminal_becomes_leaf(self):
        assert debinarize(Terminal("dog", "NN")) == Leaf("dog", "NN")

    def test_empty_labeled_root_rejected(self):
        tree = Internal(EMPTY_LABEL, Terminal("a", "T"), Terminal("b", "T"))
        with pytest.raises(StructureError):
            debinarize(tree)

    def test_ternary_roundtrip(self):
        (tree,) = parse_bracketed("(NP (DT a) (JJ b) (NN c))")
        assert debinarize(binarize(tree)) == tree

    def test_roundtrip_random_trees(self):
        rng = np.random.default_rng(7)
        for _ in range(2000):
            tree = random_nary_tree(rng)
            assert debinarize(binarize(tree)) == tree

    def test_roundtrip_sample_treebank(self):
        for tree in parse_bracketed(SAMPLE.read_text(encoding="utf-8")):
            cleaned = preprocess(tree)
            assert debinarize(binarize(cleaned)) == cleaned

    def test_debinarize_arbitrary_binary_trees_is_total(self):
        # any binary tree with a non-empty root label maps to some n-ary tree
        rng = np.random.default_rng(8)
        for _ in range(300):
            tree = random_binary_tree(rng, int(rng.integers(1, 10)))
            if isinstance(tree, Internal) and tree.label == EMPTY_LABEL:
                tree.label = "S"
            result = debinarize(tree)
            assert result is not None
