import sys

if sys.version_info < (3, 9):
    print("[brickqec] Python 3.9+ required.", file=sys.stderr)
    sys.exit(1)

from brickqec.cli.cli_main import main as _cli_main


def main():
    sys.exit(_cli_main())


if __name__ == "__main__":
    main()
