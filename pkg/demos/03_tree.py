# coding: utf-8

# # The tree of points
#
# Every finite sequence s names a point z_s and a level l_s. A child copies
# its parent's first l_s coordinates, places values from the parent's thick
# set above them, and carries one marker coordinate that keeps siblings apart.

# In[1]:

from borelforge.tree import ball, child, disjointness_certificate, eval_coordinate, node_at, root

c0, c1 = child(root(), 0), child(root(), 1)
print(c0, c0.prefix())
print(c1, c1.prefix())


# Two siblings differ by at least 1/4 at some coordinate below both levels,
# while every ball has radius at most 2**-4. So their balls are disjoint.

# In[2]:

for i, j in [(0, 1), (3, 7), (0, 40)]:
    cert = disjointness_certificate(root(), i, j)
    print((i, j), "coordinate", cert.coordinate, "gap", cert.gap)


# Nodes are built only when asked for, so a deep path is cheap.

# In[3]:

s = node_at([2, 0, 5, 1])
print(s, "family", s.family)
print("radius of its ball:", ball(s).radius)


# A branch is a finite stem followed by zeros. Its limit point is evaluated one
# coordinate at a time; coordinate k only needs the prefix nodes up to the
# first level above k.

# In[4]:

print([eval_coordinate([1], k) for k in range(6)])
print(eval_coordinate([1], 300))
