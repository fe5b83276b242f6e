const path = require('path');

function normalize(name) {
  return name.trim().toLowerCase();
}

const base = path.basename('/tmp/File.TXT');
const ext = path.extname(base);
const label = 'Report'.toUpperCase() + ext;
const title = 'a-b-c'.split('-').join(' ');
const width = 'abc'.length;
console.log(path.sep, path.length, normalize(base), label, title, width);
