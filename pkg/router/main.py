import sys

from router.cli import build_parser
from router.decorators import time_of_script
from router.logging_config import setup_logging

setup_logging()


@time_of_script
def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.handler(args)


if __name__ == '__main__':
    sys.exit(main())
