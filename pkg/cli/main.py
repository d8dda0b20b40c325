import os
import sys

from termcolor import colored

from lie.rootdata import build_root_system
from opers.miura import CartanConnection
from opers.oper import CanonicalOper, OperOperator, classify_monodromy_free, embed_canonical, reduce_to_canonical
from series.formal import PrecisionError
from cli.verify import run_verify
import utils

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_PRECISION = 3


def load_oper(payload) -> OperOperator:
    """Oper operator from any of the three input shapes.

    {"type", "v"}: d/dt + p_- + v, v on the Borel components.
    {"type", "coords"}: canonical coordinates.
    {"type", "u"}: a Cartan connection, read as its Miura oper.
    """
    if not isinstance(payload, dict) or "type" not in payload:
        raise utils.InputError("Input must be a json object with a 'type' field")
    if "coords" in payload:
        return embed_canonical(CanonicalOper.from_json(payload))
    if "u" in payload:
        conn = CartanConnection.from_json(payload)
        return OperOperator(conn.rs, conn.loop())
    return OperOperator.from_json(payload)


def cmd_reduce(config) -> int:
    op = load_oper(utils.read_json_input(config["input"]))
    canonical = reduce_to_canonical(op, config["precision"])
    utils.write_text(utils.to_json_text(canonical.to_json()), config["json_out"])
    return EXIT_OK


def cmd_classify(config) -> int:
    op = load_oper(utils.read_json_input(config["input"]))
    coweight = classify_monodromy_free(op, config["bound"], config["working_precision"])
    payload = None
    if coweight is not None:
        rs = build_root_system(coweight.system)
        payload = {"type": rs.label,
                   "coweight": coweight.to_json(),
                   "cartan_coords": rs.coweight_to_cartan_coords(coweight)}
    utils.write_text(utils.to_json_text(payload), config["json_out"])
    return EXIT_OK


def cmd_verify(config) -> int:
    report, exit_code = run_verify(config)
    utils.write_text(utils.to_json_text(report), config["json_out"])
    return exit_code


COMMANDS = {
    "reduce": cmd_reduce,
    "classify": cmd_classify,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    default_config_path = os.path.join(os.path.dirname(os.path.realpath(__file__)), 'config.yaml')
    config = utils.get_config(default_config_path, argv)

    try:
        return COMMANDS[config["command"]](config)
    except PrecisionError as e:
        print(colored(f"Precision exhausted: {e}", "yellow"), file=sys.stderr)
        return EXIT_PRECISION
    except (KeyError, TypeError, ValueError) as e:
        # InputError, RootSystemError and ConnectionResidueError are ValueErrors
        print(colored(f"Invalid input: {e}", "red"), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
