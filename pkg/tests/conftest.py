import oplearn  # noqa: F401  -- pins the BLAS thread pool before numpy loads
