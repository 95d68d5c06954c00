"""
Reading and writing the CSV tables and JSON run manifests that form the file interface of the package.

All numbers are written with `repr`, which is locale independent and round-trips exactly, so identical inputs always
produce byte-identical files.
"""
from __future__ import absolute_import, division, print_function

import csv
import hashlib
import io
import json
import logging
import os

import numpy as np

from . import __version__, constants
from .base import TableFormatError

logger = logging.getLogger(__name__)

data_directory = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data')


def package_data(name):
    """Return the absolute path of a file shipped in the package data directory."""
    return os.path.join(data_directory, name)


def read_columns(path, header):
    """
    Read a headed CSV file of floats and return one array per column.

    :param path: the file to read.
    :param header: the exact sequence of column names expected on the first non-comment line.
    :return: dict mapping column name to array[float].
    :raises TableFormatError: if the header differs or a row is malformed; the message cites the line number.
    """
    header = list(header)
    rows = []
    found_header = False
    with io.open(path, 'r', encoding='utf-8', newline='') as f:
        for line_number, row in enumerate(csv.reader(f), start=1):
            if not row or row[0].strip().startswith('#'):
                continue
            cells = [cell.strip() for cell in row]
            if not found_header:
                if cells != header:
                    raise TableFormatError("expected header {} but found {}".format(','.join(header), ','.join(cells)),
                                           filename=path, line=line_number)
                found_header = True
                continue
            if len(cells) != len(header):
                raise TableFormatError("expected {} columns but found {}".format(len(header), len(cells)),
                                       filename=path, line=line_number)
            try:
                rows.append([float(cell) for cell in cells])
            except ValueError:
                raise TableFormatError("non-numeric value in row {}".format(','.join(cells)), filename=path,
                                       line=line_number)
    if not found_header:
        raise TableFormatError("missing header {}".format(','.join(header)), filename=path)
    if not rows:
        raise TableFormatError("table has no data rows", filename=path)
    values = np.array(rows, dtype=float)
    logger.debug("Read %d rows from %s", values.shape[0], path)
    return dict((name, values[:, index]) for index, name in enumerate(header))


def format_value(value):
    """Format one cell: floats round-trip through repr, None is empty, bools are lower case."""
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_rows(path, header, rows):
    """
    Write a headed CSV file with one line per row and Unix line endings.

    :param path: the output file.
    :param header: sequence of column names.
    :param rows: iterable of sequences with the same length as header.
    :return: the path written.
    """
    with io.open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([format_value(value) for value in row])
    logger.info("Wrote %s", path)
    return path


def sha256_file(path):
    digest = hashlib.sha256()
    with io.open(path, 'rb') as f:
        for block in iter(lambda: f.read(1 << 16), b''):
            digest.update(block)
    return digest.hexdigest()


def write_manifest(path, command, config, inputs=(), outputs=()):
    """
    Write the JSON manifest that accompanies the outputs of one command.

    :param path: the manifest file.
    :param command: the subcommand name.
    :param config: the resolved configuration as a JSON-compatible dict.
    :param inputs: paths of input files; each is recorded with its sha256.
    :param outputs: paths of output files; each is recorded with its sha256.
    :return: the manifest as a dict.
    """
    manifest = {'package': 'ffwm',
                'version': __version__,
                'command': command,
                'config': config,
                'constants': constants.constants_table(),
                'constants_sha256': constants.constants_hash(),
                'inputs': dict((str(p), sha256_file(p)) for p in inputs),
                'outputs': dict((os.path.basename(str(p)), sha256_file(p)) for p in outputs)}
    with io.open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(json.dumps(manifest, indent=2, sort_keys=True))
        f.write('\n')
    logger.info("Wrote manifest %s", path)
    return manifest
