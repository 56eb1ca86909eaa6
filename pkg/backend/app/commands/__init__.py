"""Subcommands of the knot toolkit CLI; each module exposes register(subparsers)."""
