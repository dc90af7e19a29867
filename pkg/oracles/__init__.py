"""Reference engines used to cross-check FAR: backward reachability and explicit-state search."""
