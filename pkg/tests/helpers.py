from affine_conjugacy.engine.linalg import AffineOperator, Matrix


def operator(rows, b=None, field=None):
    A = Matrix.from_rows(rows, field)
    return AffineOperator(A, tuple(b) if b is not None else (0,) * A.rows)


def partitions(n, largest=None):
    """Partitions of n as descending tuples."""
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest
