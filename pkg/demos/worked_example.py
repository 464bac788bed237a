"""A six-activity toy log, mined and scored by hand-checkable numbers.

Three training traces share the backbone A..C..D..F with an E wandering
around it.  At 80% support every training trace must contain a pattern.
"""

from fspclust import mine_frequent, score_trace, select_bundle

train = [tuple("ACDEF"), tuple("AECDF"), tuple("BACEDF")]

patterns = mine_frequent(train, 0.8)
bundle = select_bundle(patterns)

print("all frequent patterns:", len(patterns))
print("SP1   ", [p.labels for p in bundle.sp1])
print("SP2   ", [p.labels for p in bundle.sp2])
print("SPclo ", [p.labels for p in bundle.sp_clo])

# B never reaches 80% (only one of three traces has it), so it is invisible here
new_trace = tuple("BACDF")
print("score of", "".join(new_trace), "=", score_trace(new_trace, bundle).as_tuple())

# dropping D from the backbone costs one SP1 hit, three SP2 hits, and the closed match
print("score of ACF =", score_trace(tuple("ACF"), bundle).as_tuple())
