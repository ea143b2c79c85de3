# coding: utf-8

# # Arithmetic with towers of two
#
# Coordinates in this package grow like 2**(2**a) with a in the millions, far
# past anything a machine can write down. A TowerForm keeps such a number as
# a short list of (a, q) pairs plus a rational remainder.

# In[1]:

from fractions import Fraction

from borelforge.exact_arith import BudgetExceeded, TowerForm, tf_abs_ge, tf_sign

T = TowerForm.tower


# Small towers behave like ordinary numbers, and index 0 folds into the
# rational part because 2**(2**0) is just 2.

# In[2]:

x = T(3) + 3
print(x, "=", x.expand())
print(T(0, 5), "is rational:", T(0, 5).is_rational)


# The sign of a form is read off its largest tower whenever that term provably
# outweighs the rest. Nothing gets expanded here.

# In[3]:

huge = T(10 ** 17) - T(10 ** 17 - 1, 10 ** 9) - 10 ** 30
print("sign:", tf_sign(huge))
print("|huge| >= 10**100:", tf_abs_ge(huge, 10 ** 100))


# When two towers of the same height nearly cancel, the leading term proves
# nothing. Small cases are settled by expansion; past the bit budget we get
# an exception, never a guess.

# In[4]:

tight = T(11) - T(10, 2 ** 1024)
print("sign by expansion:", tf_sign(tight))
try:
    tf_sign(tight, bit_budget=1024)
except BudgetExceeded as err:
    print("refused:", err)


# Forms serialize to plain JSON with rationals written as p/q strings.

# In[5]:

print((T(40, Fraction(-1, 3)) + Fraction(7, 2)).to_json())
