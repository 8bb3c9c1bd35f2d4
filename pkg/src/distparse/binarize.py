"""Conversion between n-ary treebank trees and strictly binary trees.

Binarization is reversible: unary chains collapse into ``+``-joined atomic
labels, nodes introduced while splitting n-ary constituents are labeled
with the empty label, and a unary chain that bottoms out at a single word
is stored on that word's terminal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .trees import Leaf, NaryTree, Tree

EMPTY_LABEL = "∅"  # ∅, marks spans that are not real constituents
CHAIN_SEPARATOR = "+"


class LabelError(ValueError):
    """A nonterminal label that cannot be encoded reversibly."""


class StructureError(ValueError):
    """A binary tree that does not map back to an n-ary tree."""


@dataclass(slots=True)
class Terminal:
    """A word with its POS tag and the label of the unary chain directly
    above it (:data:`EMPTY_LABEL` when there is no such chain)."""

    word: str
    tag: str
    unary_label: str = EMPTY_LABEL


@dataclass(slots=True)
class Internal:
    """A binary constituent. ``label`` may be :data:`EMPTY_LABEL` or a
    collapsed chain such as ``S+VP``."""

    label: str
    left: "BinaryTree"
    right: "BinaryTree"


BinaryTree = Union[Internal, Terminal]


def _check_label(label: str) -> str:
    if CHAIN_SEPARATOR in label:
        raise LabelError(
            f"label {label!r} contains the chain separator {CHAIN_SEPARATOR!r}"
        )
    if label == EMPTY_LABEL:
        raise LabelError(f"label {label!r} collides with the empty-label marker")
    if not label:
        raise LabelError("empty nonterminal label")
    return label


def _collapse_chain(node: NaryTree) -> tuple[str, NaryTree | Leaf]:
    """Walk down a maximal unary chain, returning the joined label and the
    node the chain bottoms out at (a leaf, or a node with >=2 children)."""
    labels = [_check_label(node.label)]
    current: Tree = node
    while True:
        assert isinstance(current, NaryTree)
        if len(current.children) != 1:
            return CHAIN_SEPARATOR.join(labels), current
        child = current.children[0]
        if isinstance(child, Leaf):
            return CHAIN_SEPARATOR.join(labels), child
        labels.append(_check_label(child.label))
        current = child


def binarize(tree: Tree) -> BinaryTree:
    """Convert an n-ary tree into an equivalent strictly binary tree.

    Nodes with more than two children are split after their first child,
    repeatedly; every introduced node gets the empty label and the original
    label stays on top. Raises :class:`LabelError` if a label cannot be
    encoded reversibly.
    """
    results: list[BinaryTree] = []
    # ("visit", tree) expands a node; ("combine", label, k) folds the top k
    # results into one binary constituent.
    work: list[tuple] = [("visit", tree)]
    while work:
        action = work.pop()
        if action[0] == "visit":
            node = action[1]
            if isinstance(node, Leaf):
                results.append(Terminal(node.word, node.tag))
                continue
            chain, bottom = _collapse_chain(node)
            if isinstance(bottom, Leaf):
                results.append(Terminal(bottom.word, bottom.tag, chain))
            else:
                work.append(("combine", chain, len(bottom.children)))
                for child in reversed(bottom.children):
                    work.append(("visit", child))
        else:
            _, label, count = action
            children = results[-count:]
            del results[-count:]
            right = children[-1]
            for child in reversed(children[1:-1]):
                right = Internal(EMPTY_LABEL, child, right)
            results.append(Internal(label, children[0], right))
    (root,) = results
    return root


def _expand_terminal(terminal: Terminal) -> Tree:
    node: Tree = Leaf(terminal.word, terminal.tag)
    if terminal.unary_label != EMPTY_LABEL:
        for label in reversed(terminal.unary_label.split(CHAIN_SEPARATOR)):
            node = NaryTree(label, [node])
    return node


def _expand_chain(label: str, children: list[Tree]) -> NaryTree:
    labels = label.split(CHAIN_SEPARATOR)
    node = NaryTree(labels[-1], children)
    for lab in reversed(labels[:-1]):
        node = NaryTree(lab, [node])
    return node


def debinarize(tree: BinaryTree) -> Tree:
    """Invert :func:`binarize`: splice out empty-labeled nodes and expand
    collapsed chains. Raises :class:`StructureError` if the root itself is
    empty-labeled (there is no parent to splice its children into)."""
    if isinstance(tree, Internal) and tree.label == EMPTY_LABEL:
        raise StructureError("root carries the empty label")
    # Post-order fold. Each visited node leaves a list of n-ary trees on
    # the results stack: one tree normally, its promoted children when the
    # node is empty-labeled.
    results: list[list[Tree]] = []
    work: list[tuple] = [("visit", tree)]
    while work:
        action = work.pop()
        if action[0] == "visit":
            node = action[1]
            if isinstance(node, Terminal):
                results.append([_expand_terminal(node)])
            else:
                work.append(("combine", node.label))
                work.append(("visit", node.right))
                work.append(("visit", node.left))
        else:
            label = action[1]
            right = results.pop()
            left = results.pop()
            children = left + right
            if label == EMPTY_LABEL:
                results.append(children)
            else:
                results.append([_expand_chain(label, children)])
    (trees,) = results
    (root,) = trees
    return root
