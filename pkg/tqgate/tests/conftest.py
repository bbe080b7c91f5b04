from tqgate.test_util import scenario1, scenario2  # noqa: F401
