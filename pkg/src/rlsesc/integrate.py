"""Classical fourth-order Runge-Kutta step."""


def rk4_step(f, t, x, dt):
    """Advance ``x' = f(t, x)`` by one step of size ``dt``.

    ``x`` may be a float, an ndarray or a tuple of ndarrays; tuples are
    combined element-wise so coupled matrix/vector states need no packing.
    """
    if isinstance(x, tuple):
        def axpy(a, u, v):
            return tuple(ui + a * vi for ui, vi in zip(u, v))

        def combine(u, k1, k2, k3, k4):
            return tuple(ui + dt / 6.0 * (a + 2 * b + 2 * c + d)
                         for ui, a, b, c, d in zip(u, k1, k2, k3, k4))
    else:
        def axpy(a, u, v):
            return u + a * v

        def combine(u, k1, k2, k3, k4):
            return u + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)

    k1 = f(t, x)
    k2 = f(t + dt / 2, axpy(dt / 2, x, k1))
    k3 = f(t + dt / 2, axpy(dt / 2, x, k2))
    k4 = f(t + dt, axpy(dt, x, k3))
    return combine(x, k1, k2, k3, k4)
