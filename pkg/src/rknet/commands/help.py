from __future__ import annotations

from typing import List


def cmd_help(argv: List[str]) -> int:
    """Show this help"""
    # late import: __main__ imports the command modules
    from rknet.__main__ import registry

    print("rknet\n")
    print("Usage:")
    print("  python -m rknet <command> [args...]\n")
    print("Commands:")

    cmds = registry()
    for name in sorted(cmds):
        fn = cmds[name]
        desc = (fn.__doc__ or "").strip().splitlines()[0].strip() if fn.__doc__ else ""
        if not desc and name == "version":
            desc = "Print package version"
        print(f"  {name:<10} {desc}")

    print("")
    print("Exit codes: 0 ok, 2 config, 3 validation, 4 numeric failure, 5 equivalence failure")
    return 0
