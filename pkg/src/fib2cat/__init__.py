"""fib2cat: exhaustive verification of finite fibrations and the 2-categories
of fibration homotopies they generate."""

__version__ = "0.1.0"
