def test_import():
    import qhahn  # noqa: F401
