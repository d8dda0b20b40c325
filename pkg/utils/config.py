import sys
import yaml
import argparse
from pathlib import Path

from utils.pretty_print import pretty_print
from utils.utils import flatten_dict


def get_config(default_config_path, argv=None):
    parser = argparse.ArgumentParser(formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    arg = parser.add_argument
    arg("-c", "--config_path", type=Path, help="Path to the config.", default=default_config_path)

    # This line is key to pull the config file (if specified)
    temp_args, _ = parser.parse_known_args(argv)

    with open(temp_args.config_path) as f:
        config = yaml.load(f, Loader=yaml.SafeLoader)

    # Every top level section of the yaml is a subcommand, every key in it a flag:
    #   verify:
    #     lambda_max: 3      ->   verify --lambda-max 3
    # Keys without a scalar default (null, lists, booleans) are parsed with yaml,
    # so `--lambda "[1, 2]"` and `--json-out report.json` both work.
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, section in config.items():
        sub = subparsers.add_parser(command, formatter_class=argparse.ArgumentDefaultsHelpFormatter)
        for k, v in (section or {}).items():
            flag = "--" + k.replace("_", "-")
            if v is None or isinstance(v, (bool, list, dict)):
                sub.add_argument(flag, dest=k, default=v, type=yaml.safe_load, help=" ")
            else:
                sub.add_argument(flag, dest=k, default=v, type=type(v), help=" ")

    args = parser.parse_args(argv)
    config = dict(args.__dict__)

    if "run_name" in config:
        flat_config = flatten_dict(config)
        config["run_name"] = config["run_name"].format(**flat_config)
    # stdout is reserved for json payloads
    print(pretty_print(config), file=sys.stderr)
    return config
