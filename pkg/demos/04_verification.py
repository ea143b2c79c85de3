# coding: utf-8

# # Checking the inequalities
#
# Each check below runs on exact values. A failure would mean a defect in the
# construction, never a rounding accident.

# In[1]:

from borelforge.verifier import CombinationSpec, claim2_check, lemma1_fuzz, r_and_l, verify_tree


# Separation: for points from at most m distinct thick sets, one of them
# beyond Xi_m, and coefficients within [-m, m] but at least 1/m in size, the
# combination has absolute value at least m + 1.

# In[2]:

report = lemma1_fuzz(500, m_max=3, a_max=12, seed=1)
print(report.lines()[-1])


# Linear combinations of limit points: beyond max(l_E, Xi_m) every coordinate
# of the combination has absolute value at least 1.

# In[3]:

print(r_and_l([[], [1]]))
spec = CombinationSpec.build(2, [[], [1]], [2, -2])
result = claim2_check(spec, range(260, 270))
for k, value, ok in result.entries[:3]:
    print(k, ok, value)


# The tree conditions: disjoint sibling balls, growing levels, coordinates in
# the right thick sets, and every grid target reachable by some child.

# In[4]:

tree_report = verify_tree(3, 6)
print(tree_report.lines()[-1])
