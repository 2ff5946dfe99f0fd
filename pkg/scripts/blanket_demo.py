"""Markov blanket of T in the 16-vertex example graph, under the oracle and from data.

    python3 scripts/blanket_demo.py
"""
from cglearn.blanket import MbAlgorithm, learn_mb
from cglearn.ci import FisherZ, GraphOracle
from cglearn.graph import ChainGraph, csp, true_markov_blanket
from cglearn.simulate import SampleConfig, sample_gaussian

NAMES = "ABCDEFGHIJKLMNOT"
DIRECTED = ["AD", "BE", "CT", "GT", "TK", "KO", "LK", "JN", "IM", "HI"]
UNDIRECTED = ["DE", "EF", "BC", "FT", "IJ", "JK", "MN", "NO"]


def show(vs):
    return "{" + ",".join(sorted(NAMES[v] for v in vs)) + "}"


def main():
    ix = NAMES.index
    g = ChainGraph(16, [(ix(a), ix(b)) for a, b in DIRECTED], [(ix(a), ix(b)) for a, b in UNDIRECTED])
    t = ix("T")
    print("true Mb(T) =", show(true_markov_blanket(g, t)), " csp(T) =", show(csp(g, t)))
    oracle = GraphOracle(g)
    data = FisherZ.from_dataset(sample_gaussian(g, SampleConfig(5000, 1)))
    print(f"{'algorithm':<12}{'oracle':<20}{'tests':>7}   {'n=5000':<20}{'tests':>7}")
    for algo in MbAlgorithm:
        a = learn_mb(oracle, t, algo)
        b = learn_mb(data, t, algo, 0.01)
        print(f"{algo.value:<12}{show(a.blanket):<20}{a.test_count:>7}   {show(b.blanket):<20}{b.test_count:>7}")


if __name__ == "__main__":
    main()
