"""System and file management utilities"""

import os
import re
import tempfile


def validfilename(filename):
    """
    Remove all characters that are not portable in a file name.

    Only alphanumeric, ".", "-" and "_" are kept (POSIX portable file name
    character set). "-" on start and "." on end of names are removed.

    Parameters
    ----------
    filename : str
        File name (not a path).

    Return
    -------
    out : str
        Fixed filename.
    """
    validname = re.sub('[^a-zA-Z0-9_.-]', '', filename)

    # Remove ending and starting characters that can generate OS errors
    prevlen = -1
    while len(validname) != prevlen:
        prevlen = len(validname)
        validname = validname.rstrip('.').lstrip('-')

    if not validname:
        raise ValueError('All characters in filename are invalid')
    return validname


def atomic_write(path, text, encoding='utf-8'):
    """
    Write text to a file atomically.

    Text is written in a temporary file of the target directory, then moved
    over the target path, so readers never see a partial file.

    Parameters
    ----------
    path : str
        Target file path.
    text : str
        Content to write.
    encoding : str, optional
        Text encoding.
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    handle, tmppath = tempfile.mkstemp(
        dir=directory, prefix='.{}.'.format(os.path.basename(path)),
        suffix='.tmp')
    try:
        with os.fdopen(handle, 'w', encoding=encoding, newline='\n') as tmp:
            tmp.write(text)
        os.replace(tmppath, path)
    except BaseException:
        if os.path.exists(tmppath):
            os.remove(tmppath)
        raise


def outputpath(directory, filename, prefix=''):
    """
    Return the path of an output file.

    Parameters
    ----------
    directory : str
        Output directory.
    filename : str
        Base file name.
    prefix : str, optional
        Prefix added to the file name as "prefix_filename", sanitized with
        "validfilename".

    Return
    -------
    out : str
    """
    if prefix:
        filename = '{}_{}'.format(validfilename(prefix), filename)
    return os.path.join(directory, filename)
