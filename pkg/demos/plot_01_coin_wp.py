"""
Pre-expectations of a coin flip
===============================

A probabilistic assignment picks one of several values with given weights.
Its weakest pre-expectation is the weighted sum of the post-expectation
with each value substituted in.
"""

from pwpgrover import evaluate, final_distribution, parse, parse_expr, wp, wp_subst
from pwpgrover.lang import pretty_expr

# 'head and 'tail are symbol literals, equal only to themselves
coin = parse("coin := 'head @ 0.5, 'tail @ 0.5")
post = parse_expr("coin = 'head")

# forward: run the program to a finite distribution of final states
for weight, env in final_distribution(coin):
    print(weight, env)

print("wp, forward  :", wp(coin, post))

# backward: build the pre-expectation as an expression, then evaluate it
pre = wp_subst(coin, post)
print("wp, backward :", evaluate(pre))

# ordinary assignment is plain substitution
print(pretty_expr(wp_subst(parse("x := 7"), parse_expr("x > y"))))
