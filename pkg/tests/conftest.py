import os
import random

import pytest

from fsmdiag import Fsm

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_path(name):
    return os.path.join(FIXTURES, name)


def sym(pairs):
    """Symmetric closure of a collection of pairs, as a plain set."""
    out = set()
    for a, b in pairs:
        out.add((a, b))
        out.add((b, a))
    return out


def theta(states):
    return {(s, s) for s in states}


def make_m1():
    """Six states, every state initial, critical state 3; states 3 and 5
    share the output of 1, so crossings can only be told apart with lag."""
    return Fsm(
        "123456", "123456",
        {"1": "a", "3": "a", "5": "a", "2": "b", "4": "b", "6": "c"},
        [("1", "6"), ("2", "1"), ("2", "3"), ("6", "2"),
         ("3", "4"), ("4", "6"), ("5", "4"), ("6", "5")],
        {"3"})


def make_m2():
    """Two all-a branches through the critical states 3 and 4, rejoining at
    the c-labelled states 6/7."""
    return Fsm(
        "1234567", "1234567",
        {"1": "a", "2": "a", "3": "a", "4": "a", "5": "a", "6": "c", "7": "c"},
        [("1", "2"), ("2", "3"), ("3", "6"), ("1", "4"), ("4", "5"),
         ("5", "6"), ("6", "6"), ("6", "7"), ("7", "1")],
        {"3", "4"})


def make_fork():
    """A 1-2 loop feeding a fork whose branches are output-identical; the
    crossing into 3 can happen arbitrarily late and is never detectable."""
    return Fsm(
        "1234", "1",
        {"1": "a", "2": "b", "3": "c", "4": "c"},
        [("1", "2"), ("2", "1"), ("2", "4"), ("3", "3"), ("4", "3"), ("4", "4")],
        {"3"})


def make_silent():
    """One silent critical state (3) between the a/b part and the tail."""
    return Fsm(
        "012345", "04",
        {"0": "a", "1": "a", "4": "a", "2": "b", "5": "c", "3": "_"},
        [("0", "1"), ("1", "3"), ("3", "5"), ("5", "5"), ("3", "4"),
         ("4", "5"), ("4", "2"), ("2", "3")],
        {"3"})


def random_live_fsm(rng, max_states=6, max_outputs=3):
    n = rng.randint(2, max_states)
    states = [str(i) for i in range(1, n + 1)]
    syms = "abc"[:rng.randint(1, max_outputs)]
    label = {s: rng.choice(syms) for s in states}
    trans = []
    for s in states:
        for t in rng.sample(states, rng.randint(1, min(2, n))):
            trans.append((s, t))
    initial = rng.sample(states, rng.randint(1, n))
    critical = rng.sample(states, rng.randint(0, n - 1))
    return Fsm(states, initial, label, trans, critical)


@pytest.fixture
def m1():
    return make_m1()


@pytest.fixture
def m2():
    return make_m2()


@pytest.fixture
def m2_single(m2):
    return m2.replace(initial=frozenset("1"))


@pytest.fixture
def fork():
    return make_fork()


@pytest.fixture
def silent_machine():
    return make_silent()


@pytest.fixture
def rng():
    return random.Random(20260823)
