"""
The state-dependent volatility coefficient
==========================================

AdaVol multiplies the Langevin noise by h = f((F - c)^+) + 1, where
f(u) = lam (1 - exp(-theta u^2)). Far above the threshold c the chain moves
with step eta (lam + 1); at or below c it is plain Langevin.
"""

import numpy as np

from adavol.diffusion import ActivationParams, activation, activation_derivative, coefficient_gradient, drift

p = ActivationParams(lam=10.0, theta=1.0, c=0.0)

# the activation saturates at lam; its slope peaks at u = 1/sqrt(2 theta)
u = np.array([0.0, 0.25, 1 / np.sqrt(2), 1.0, 2.0, 5.0])
print("u        f(u)       f'(u)")
for ui, fi, dfi in zip(u, activation(p, u), activation_derivative(p, u)):
    print(f"{ui:6.3f}  {fi:9.5f}  {dfi:9.5f}")

# on F = x^2/2 the coefficient gradient is f'(F - c) x, and it stays below
# lam sqrt(2 theta) e^{-1/2} |F'(x)| everywhere
x = np.linspace(-4, 4, 9)
fval, grad = 0.5 * x ** 2, x[:, None]
gh = coefficient_gradient(p, fval, grad)[:, 0]
bound = p.lam * np.sqrt(2 * p.theta) * np.exp(-0.5) * np.abs(x)
print("\nx      grad h     bound")
for xi, gi, bi in zip(x, gh, bound):
    print(f"{xi:5.1f}  {gi:9.4f}  {bi:9.4f}")

# the drift -h F' + h'/beta: with beta large it is just the rescaled gradient
print("\ndrift at x = 2, beta = 1 and beta = 1e6:")
for beta in (1.0, 1e6):
    print(beta, drift(p, beta, 2.0, np.array([2.0])))

# lam = 0 switches everything off
off = ActivationParams(lam=0.0, theta=1.0)
print("\nlam = 0 drift at x = 2:", drift(off, 1.0, 2.0, np.array([2.0])))
