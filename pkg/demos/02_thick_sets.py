# coding: utf-8

# # Thick sets and their thresholds
#
# Family j owns the tower indices on row j of the Cantor pairing. Its thick
# set is the union of the intervals [2**(2**a) - a, 2**(2**a) + a] over those
# indices. Different families never share an interval.

# In[1]:

from itertools import islice

from borelforge.thick_family import (
    canonical_element,
    containing_index,
    family_indices,
    marker,
    thick_member,
    xi,
)

for j in range(4):
    print(j, list(islice(family_indices(j), 6)))


# Membership is exact, even far up the tower.

# In[2]:

from borelforge.exact_arith import TowerForm, normalize

print(thick_member(0, 4), thick_member(0, 6), thick_member(1, 14))
print(containing_index(TowerForm.tower(10 ** 15) + 7))


# The threshold table: the smallest xi for which the separation inequality
# holds from xi onward, and Xi = 2**(2**xi) + xi.

# In[3]:

for m in range(1, 7):
    th = xi(m)
    print(m, th.xi, th.Xi_int)


# The marker t_{j,n} is the first left end of family j lying above n. The
# canonical element sits half a unit to its right.

# In[4]:

for j, n in [(0, 0), (0, 5), (1, 20)]:
    print((j, n), normalize(marker(j, n)), normalize(canonical_element(j, n)))
