# coding: utf-8

# # Points of the linear hull
#
# A code (lambda_1..lambda_n, b_1 < ... < b_n) stands for the point
# sum lambda_i * h(b_i). Two distinct codes give distinct points, and a
# separating coordinate proves it.

# In[1]:

from fractions import Fraction

from borelforge.hull import HullCode, WindowUnfit, hull_distinguish, hull_encode, rescale

a = HullCode.build([1], [[]])
b = HullCode.build([1], [[1]])
sep = hull_distinguish(a, b)
print(sep.to_json())


# Encoding is linear, coordinate by coordinate.

# In[2]:

mix = HullCode.build([2, Fraction(-1, 2)], [[], [0, 1]])
point = hull_encode(mix)
print([point(k) for k in range(4)])


# A residual with a tiny coefficient fits no window m <= 3. Scaling both codes
# by the same factor keeps them distinct and makes the check go through.

# In[3]:

small = HullCode.build([Fraction(1, 10)], [[]])
zero = HullCode((), ())
try:
    hull_distinguish(small, zero)
except WindowUnfit as err:
    print("no window:", err)
print(hull_distinguish(rescale(small, 10), zero).to_json())
