__version__ = '0.1'  # pragma: no cover
