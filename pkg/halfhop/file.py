"""Graph files reading and writing"""

import io
import logging
import os

import numpy as np
import pandas as pd

from halfhop.codec import FLOAT_FORMAT
from halfhop.graph import build_graph

log = logging.getLogger(__name__)


def read_edgelist(filename, remap=False):
    """
    Read an edge list file.

    UTF-8 text, one edge per line as whitespace separated "src dst [weight]".
    Empty lines and lines starting with "#" are ignored.

    Parameters
    ----------
    filename : str
        File to read.
    remap : bool, optional
        If False, node ids must be 0-based integers. If True, node ids are
        any tokens, remapped to 0-based integers in order of first
        appearance.

    Return
    -------
    out : tuple (numpy.ndarray, numpy.ndarray or None, list or None)
        (edges as (m, 2) int64 array, weights or None if no line has a
        weight, external ids by internal id or None if not remapped).
    """
    edges = []
    weights = []
    weighted = False
    ids = {}

    with open(filename, encoding='utf-8') as handle:
        for lineno, line in enumerate(handle, 1):
            tokens = line.split()
            if not tokens or tokens[0].startswith('#'):
                continue
            if len(tokens) not in (2, 3):
                raise FileFormatError(
                    "expected 'src dst [weight]', got {} fields".format(
                        len(tokens)), filename, lineno)

            if remap:
                pair = [ids.setdefault(token, len(ids)) for token in tokens[:2]]
            else:
                try:
                    pair = [int(token) for token in tokens[:2]]
                except ValueError:
                    raise FileFormatError('node ids must be integers',
                                          filename, lineno)
                if min(pair) < 0:
                    raise FileFormatError('node ids must be nonnegative',
                                          filename, lineno)
            edges.append(pair)

            if len(tokens) == 3:
                weighted = True
                try:
                    weight = float(tokens[2])
                except ValueError:
                    raise FileFormatError('weight must be a number',
                                          filename, lineno)
                if not np.isfinite(weight) or weight < 0:
                    raise FileFormatError(
                        'weight must be finite and nonnegative',
                        filename, lineno)
                weights.append(weight)
            else:
                weights.append(1.0)

    log.debug('Read %d edges from %s', len(edges), filename)
    edges = np.array(edges, dtype=np.int64).reshape(-1, 2)
    mapping = list(ids) if remap else None
    return edges, (np.array(weights) if weighted else None), mapping


def read_matrix(filename, skip_header=False):
    """
    Read a numeric CSV file, row i being the values of node i.

    Parameters
    ----------
    filename : str
        File to read.
    skip_header : bool, optional
        If True, skip one header row.

    Return
    -------
    out : numpy.ndarray of float64, shape (rows, columns)
    """
    try:
        frame = pd.read_csv(filename, header=0 if skip_header else None,
                            dtype=str, keep_default_na=False,
                            skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise FileFormatError('file is empty', filename)
    except pd.errors.ParserError as error:
        raise FileFormatError(str(error).strip(), filename)

    values = frame.apply(pd.to_numeric, errors='coerce')
    invalid = values.isna().to_numpy().any(axis=1)
    if invalid.any():
        row = int(np.flatnonzero(invalid)[0])
        raise FileFormatError('non numeric value',
                              filename, row + 1 + int(skip_header))
    return values.to_numpy(dtype=np.float64)


def read_vector(filename, skip_header=False):
    """
    Read a single column CSV file of integers or reals.

    Parameters
    ----------
    filename : str
        File to read.
    skip_header : bool, optional
        If True, skip one header row.

    Return
    -------
    out : numpy.ndarray
        int64 array if all values are integral, else float64 array.
    """
    values = read_matrix(filename, skip_header)
    if values.shape[1] != 1:
        raise FileFormatError('expected a single column, got {}'.format(
            values.shape[1]), filename)
    values = values[:, 0]
    if np.all(values == np.round(values)):
        return values.astype(np.int64)
    return values


def read_mask(filename, skip_header=False):
    """
    Read a single column CSV file of 0/1 node membership flags.

    Parameters
    ----------
    filename : str
        File to read.
    skip_header : bool, optional
        If True, skip one header row.

    Return
    -------
    out : numpy.ndarray of bool
    """
    values = read_vector(filename, skip_header)
    invalid = np.flatnonzero((values != 0) & (values != 1))
    if invalid.size:
        raise FileFormatError('mask values must be 0 or 1', filename,
                              int(invalid[0]) + 1 + int(skip_header))
    return values.astype(bool)


def load_graph(edges, features=None, labels=None, masks=None,
               skip_header=False, remap=False, dedup=True):
    """
    Load a graph from edge list, features, labels and masks files.

    The number of nodes is the number of feature rows if a feature file is
    given, else the number of labels, else the largest node id + 1.
    With "remap", feature, label and mask rows follow the remapped ids order
    (external ids in order of first appearance in the edge list).

    Parameters
    ----------
    edges : str
        Edge list file.
    features : str, optional
        Features CSV file.
    labels : str, optional
        Labels CSV file.
    masks : dict of str: str, optional
        Mask CSV file by mask name.
    skip_header : bool, optional
        If True, CSV files have one header row.
    remap : bool, optional
        Remap external node ids (See "read_edgelist").
    dedup : bool, optional
        Remove duplicate edges.

    Return
    -------
    out : tuple (halfhop.Graph, list or None)
        (Graph, external ids by internal id or None).
    """
    edgearray, weights, mapping = read_edgelist(edges, remap)

    featarray = None if features is None else read_matrix(features,
                                                          skip_header)
    labelarray = None if labels is None else read_vector(labels, skip_header)
    maskarrays = {name: read_mask(path, skip_header)
                  for name, path in sorted((masks or {}).items())}

    if featarray is not None:
        num_nodes = featarray.shape[0]
    elif labelarray is not None:
        num_nodes = labelarray.shape[0]
    elif mapping is not None:
        num_nodes = len(mapping)
    else:
        num_nodes = int(edgearray.max()) + 1 if edgearray.size else 1

    graph = build_graph(num_nodes, edgearray, features=featarray,
                        labels=labelarray, weights=weights, masks=maskarrays,
                        dedup=dedup)
    return graph, mapping


def format_edgelist(graph):
    """
    Return the edge list text of a graph.

    Weights are written only for weighted graphs.

    Parameters
    ----------
    graph : halfhop.Graph
        Graph to write.

    Return
    -------
    out : str
    """
    columns = {'src': graph.sources, 'dst': graph.targets}
    if graph.weights is not None:
        columns['weight'] = graph.weights
    return pd.DataFrame(columns).to_csv(
        sep=' ', header=False, index=False, float_format=FLOAT_FORMAT,
        lineterminator='\n')


def format_matrix(values, header=None):
    """
    Return CSV text of a 1D or 2D array.

    Parameters
    ----------
    values : numpy.ndarray
        Values to write, one row per node.
    header : list of str, optional
        Column names. No header row if None.

    Return
    -------
    out : str
    """
    values = np.asarray(values)
    if values.ndim == 1:
        values = values[:, np.newaxis]
    return pd.DataFrame(values, columns=header).to_csv(
        header=header is not None, index=False, float_format=FLOAT_FORMAT,
        lineterminator='\n')


def format_frame(frame, index=True):
    """
    Return CSV text of a pandas DataFrame with full float precision.

    Parameters
    ----------
    frame : pandas.DataFrame
        Table to write.
    index : bool, optional
        If True, write the index as first column.

    Return
    -------
    out : str
    """
    buffer = io.StringIO()
    frame.to_csv(buffer, index=index, float_format=FLOAT_FORMAT,
                 lineterminator='\n')
    return buffer.getvalue()


def file_infos(filename):
    """
    Return file related information for provenance records.

    Parameters
    ----------
    filename : str
        File path.

    Return
    -------
    out : dict
        "filename" (base name) and "bytesize".
    """
    return {'filename': os.path.basename(filename),
            'bytesize': os.path.getsize(filename)}


class FileFormatError(ValueError):
    """Raised when a file is not in expected format."""

    msg = "File not in expected format"

    def __init__(self, msg='', filename=None, lineno=None):
        if msg:
            self.msg = msg
        self.filename = filename
        self.lineno = lineno
        ValueError.__init__(self, str(self))

    def __str__(self):
        where = ''
        if self.filename is not None:
            where = str(self.filename)
            if self.lineno is not None:
                where = '{}:{}'.format(where, self.lineno)
            where += ': '
        return where + self.msg
